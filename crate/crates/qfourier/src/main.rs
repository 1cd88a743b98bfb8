fn main() {
    std::process::exit(qfourier::cli::main_entry());
}
