fn main() {
    std::process::exit(virasoro_dls::cli::run(std::env::args().skip(1)));
}
