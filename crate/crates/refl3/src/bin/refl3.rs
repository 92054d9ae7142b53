use std::process::exit;

fn main() {
    exit(refl3::cli::run(std::env::args_os()));
}
