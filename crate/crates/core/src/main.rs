use std::io::{self, Write};

fn main() {
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = io::BufWriter::new(stdout.lock());
    let mut err = stderr.lock();
    let mut ctx = gtf::cli::Context {
        out: &mut out,
        err: &mut err,
        out_dir: ".".into(),
    };
    let code = gtf::cli::run(std::env::args_os(), &mut ctx);
    let _ = out.flush();
    std::process::exit(code);
}
