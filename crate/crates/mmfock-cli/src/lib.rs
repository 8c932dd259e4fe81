// Copyright 2026 The mmfock Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Front end of the `mmfock` command: argument definitions, command
//! execution and output rendering.

pub mod args;
pub mod commands;
pub mod output;

use std::fs;

use serde_json::json;

pub use args::Cli;
pub use commands::run;
pub use output::Report;

/// Machine-readable error document printed on failure.
pub fn error_json(err: &mmfock::Error) -> String {
    json!({ "error": err.kind(), "message": err.to_string() }).to_string()
}

/// Run and deliver the output; returns the process exit code.
pub fn main_with(cli: &Cli) -> i32 {
    let result = run(cli).and_then(|report| {
        let text = report.render(cli.format);
        match &cli.output {
            Some(path) => {
                let target = fs::canonicalize(path).ok();
                let clash = commands::input_paths(cli)
                    .iter()
                    .any(|p| target.is_some() && fs::canonicalize(p).ok() == target);
                if clash {
                    return Err(mmfock::Error::InvalidArgument(format!(
                        "refusing to overwrite input file {}",
                        path.display()
                    )));
                }
                fs::write(path, text)?;
            }
            None => print!("{text}"),
        }
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            1
        }
    }
}
