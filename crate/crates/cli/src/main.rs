fn main() { std::process::exit(hpc_cli::run(std::env::args_os())) }
