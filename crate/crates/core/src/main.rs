fn main() {
    std::process::exit(swipt_evt::cli::main_from_env());
}
