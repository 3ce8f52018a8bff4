fn main() {
    std::process::exit(lowdeg::cli::main_with(std::env::args_os()));
}
