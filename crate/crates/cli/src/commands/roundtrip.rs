use fbx_core::corpus::{read_wav, write_wav, WavEncoding};
use fbx_core::{round_trip_snr, AudioSignal, TransformConfig, TransformId};

use crate::config::RoundtripArgs;
use crate::{CliError, CliResult};

fn mono(channels: Vec<AudioSignal>) -> CliResult<AudioSignal> {
    let first = channels
        .first()
        .ok_or_else(|| CliError::Usage("input has no channels".into()))?;
    let rate = first.sample_rate();
    let len = first.len();
    let count = channels.len() as f64;
    let mut sum = vec![0.0; len];
    for ch in &channels {
        for (acc, s) in sum.iter_mut().zip(ch.samples()) {
            *acc += s;
        }
    }
    Ok(AudioSignal::new(sum.into_iter().map(|s| s / count).collect(), rate)?)
}

pub fn run(args: &RoundtripArgs) -> CliResult<()> {
    let signal = mono(read_wav(&args.input)?)?;
    if signal.is_empty() {
        return Err(CliError::Usage(format!("{} contains no samples", args.input.display())));
    }
    let config = match args.transform {
        TransformId::Stft => TransformConfig::Stft {
            frame_length: args.frame_length,
            hop: args.hop,
        },
        TransformId::Mdct => TransformConfig::Mdct {
            frame_length: args.frame_length,
        },
        TransformId::Pqmf => TransformConfig::Pqmf {
            window: args.window.clone(),
        },
    };
    let transform = config.build()?;
    let tf = transform.analyze(&signal)?;
    let back = transform.synthesize(&tf)?;
    let snr = round_trip_snr(&signal, &back)?;

    println!("transform\t{}", transform.id());
    println!("frames\t{}", tf.num_frames());
    println!("subbands\t{}", tf.num_subbands());
    println!("delay_samples\t{}", transform.system_delay());
    println!("snr_db\t{snr:.3}");
    if let Some(out) = &args.output {
        write_wav(out, &back, WavEncoding::Float32)?;
    }
    Ok(())
}
