use clap::Parser;

fn main() {
    let cli = match cdgsk::config::Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            let err = cdgsk::error::CliError::Validation(e.to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            std::process::exit(err.exit_code());
        }
    };
    std::process::exit(cdgsk::main_with(&cli));
}
