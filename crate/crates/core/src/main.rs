fn main() {
    // Restore the default SIGPIPE disposition so a closed pipe
    // (`surfcone ... | head`) ends the process quietly instead of
    // panicking mid-print; Rust ignores SIGPIPE by default.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(surfcone::cli::run());
}
