fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(mub6::cli::run(&args));
}
