//! `diracctl`: thin wrapper over [`dirac_core::cli::run`].

fn main() {
    let code = dirac_core::cli::run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
