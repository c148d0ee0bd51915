fn main() {
    std::process::exit(pvfreq::cli::main());
}
