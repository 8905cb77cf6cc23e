use std::fs;
use std::path::PathBuf;

use fbx_core::window_design::{design_pqmf_prototype, write_window, DesignOptions, WindowSidecar};
use log::info;

use crate::config::DesignArgs;
use crate::{CliError, CliResult};

fn report_path(out: &std::path::Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".report.json");
    PathBuf::from(s)
}

fn resolve_options(args: &DesignArgs) -> CliResult<DesignOptions> {
    let mut opts = match &args.options {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            DesignOptions::from_json(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => DesignOptions::default(),
    };
    if let Some(v) = args.seed {
        opts.seed = v;
    }
    if let Some(v) = args.tolerance {
        opts.tolerance = v;
    }
    if let Some(v) = args.max_iterations {
        opts.max_iterations = v;
    }
    if let Some(v) = args.passband_weight {
        opts.passband_weight = v;
    }
    if let Some(v) = args.stopband_weight {
        opts.stopband_weight = v;
    }
    if let Some(v) = args.grid_density {
        opts.grid_density = v;
    }
    opts.validate()?;
    Ok(opts)
}

pub fn run(args: &DesignArgs) -> CliResult<()> {
    let opts = resolve_options(args)?;
    info!(
        "designing N={} L={} with {}",
        args.subbands,
        args.overlap,
        serde_json::to_string(&opts)?
    );
    let (window, report) = design_pqmf_prototype(args.subbands, args.overlap, &opts)?;
    write_window(&args.out, &window, &WindowSidecar::from_design(&window, &opts, &report))?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    fs::write(report_path(&args.out), json)?;

    println!("passband_max_deviation\t{:e}", report.passband_max_deviation);
    println!("stopband_energy\t{:e}", report.stopband_energy);
    println!("iterations\t{}", report.iterations);
    println!("converged\t{}", report.converged);
    if !report.converged {
        log::warn!(
            "passband deviation {:e} exceeds tolerance {:e}",
            report.passband_max_deviation,
            opts.tolerance
        );
    }
    Ok(())
}
