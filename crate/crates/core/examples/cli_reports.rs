//! Drive the `diracctl` front end in-process: load a corpus manifest, run a
//! check and print the JSON report.

use dirac_core::cli::{self, corpus};

fn main() {
    let manifest = corpus::default_dir().join("graph_z_dxdy.json");
    let mut out = Vec::new();
    let mut err = Vec::new();
    let args = ["diracctl", "pushforward", manifest.to_str().unwrap(), "--map", "x1;x2"];
    let code = cli::run(args, &mut out, &mut err);
    print!("{}", String::from_utf8_lossy(&out));
    eprint!("{}", String::from_utf8_lossy(&err));
    println!("exit code {code}");
}
