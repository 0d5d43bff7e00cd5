fn main() {
    std::process::exit(sectorlearn::cli::main_with_args(std::env::args_os()));
}
