// Copyright 2026 The nilmin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

/// Timelike minimal surfaces in Nil3: synthesis, singularities and B-scrolls.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Directory for the output files.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Progress messages on stderr.
    #[arg(short, long)]
    verbose: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = nilmin::RunOptions {
        out_dir: cli.out_dir,
        verbose: cli.verbose,
    };
    let result = nilmin::load_config(&cli.config).and_then(|cfg| nilmin::run(&cfg, &opts));
    match result {
        Ok(report) => {
            if opts.verbose {
                eprintln!("done in {:.3} s", report.timing.seconds);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("nilmin: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
