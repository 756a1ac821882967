fn main() {
    std::process::exit(coherence_dof::cli::main_entry());
}
