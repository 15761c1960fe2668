fn main() {
    std::process::exit(geom_sarah::bench::cli_main(std::env::args_os()));
}
