fn main() {
    std::process::exit(monadforge::run(std::env::args_os()));
}
