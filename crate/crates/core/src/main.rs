fn main() {
    let out = qball::cli::run_from(std::env::args_os());
    if out.status != 2 {
        println!("{}", out.output);
    } else {
        eprintln!("{}", out.output);
    }
    std::process::exit(out.status);
}
