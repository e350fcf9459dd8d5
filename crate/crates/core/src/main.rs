fn main() {
    std::process::exit(compton_ledger::cli::run());
}
