fn main() {
    std::process::exit(gala::harness::cli_main(std::env::args_os()));
}
