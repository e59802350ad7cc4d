fn main() {
    std::process::exit(hypimetric_harness::cli::main_with(std::env::args_os()));
}
