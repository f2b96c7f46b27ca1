fn main() {
    std::process::exit(qmemtime::cli::main(std::env::args_os()));
}
