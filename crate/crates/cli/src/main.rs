fn main() {
    std::process::exit(qatm_cli::main_with_args(std::env::args_os()));
}
