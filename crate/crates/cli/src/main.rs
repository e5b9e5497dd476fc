fn main() {
    std::process::exit(ontorepair_cli::dispatch(std::env::args_os()));
}
