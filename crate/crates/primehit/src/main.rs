fn main() {
    std::process::exit(primehit::cli::main());
}
