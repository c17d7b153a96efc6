fn main() {
    std::process::exit(localhcf::cli::main_with_args(std::env::args_os()));
}
