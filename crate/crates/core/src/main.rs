use std::io::Write;

fn main() {
    if let Some(n) = std::env::var("MTT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    // Buffer stdout so a failed run leaves nothing partial behind.
    let mut buf = Vec::new();
    let mut err = std::io::stderr();
    let status = mtt_core::cli::main_with_args(std::env::args_os(), &mut buf, &mut err);
    if status == 0 || status == mtt_core::cli::EXIT_CHECK_FAILED {
        let _ = std::io::stdout().write_all(&buf);
    }
    std::process::exit(status);
}
