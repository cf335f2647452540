fn main() {
    std::process::exit(purity_lens::cli::run(std::env::args_os()));
}
