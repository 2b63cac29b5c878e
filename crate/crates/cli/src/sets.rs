use tdiam::setmodel::{SetModel, DEFAULT_CIRCLE_POINTS, DEFAULT_SEGMENT_POINTS};
use tdiam::Complex64;

use crate::args::SetArgs;
use crate::Failure;

fn parse_center(text: &str) -> Result<Complex64, Failure> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || Failure::Usage(format!("--center expects `re,im`, got `{text}`"));
    match parts.as_slice() {
        [re, im] => Ok(Complex64::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?)),
        [re] => Ok(Complex64::new(re.parse().map_err(|_| bad())?, 0.0)),
        _ => Err(bad()),
    }
}

fn primitive(name: &str, args: &SetArgs) -> Result<SetModel, Failure> {
    let model = match name {
        "circle" => {
            let center = parse_center(&args.center)?;
            SetModel::circle(center, args.radius, args.points.unwrap_or(DEFAULT_CIRCLE_POINTS))?
        }
        "segment" => SetModel::segment(args.a, args.b, args.points.unwrap_or(DEFAULT_SEGMENT_POINTS))?,
        _ => {
            if let Some(path) = name.strip_prefix("file:") {
                SetModel::from_file(path)?
            } else {
                return Err(Failure::Usage(format!(
                    "unknown set `{name}`; expected circle, segment, product:…, union:… or file:PATH"
                )));
            }
        }
    };
    Ok(model)
}

fn components(list: &str, args: &SetArgs) -> Result<Vec<SetModel>, Failure> {
    if list.trim().is_empty() {
        return Err(Failure::Usage("composite set needs at least one component".into()));
    }
    list.split(',').map(|c| primitive(c.trim(), args)).collect()
}

/// Builds the set described by `--set` and checks `--n` against it.
pub fn build(args: &SetArgs) -> Result<SetModel, Failure> {
    let spec = args.spec.trim();
    let model = if let Some(rest) = spec.strip_prefix("product:") {
        SetModel::product(components(rest, args)?)?
    } else if let Some(rest) = spec.strip_prefix("union:") {
        SetModel::union(components(rest, args)?)?
    } else {
        primitive(spec, args)?
    };
    if let Some(n) = args.n {
        if n != model.dim() {
            return Err(Failure::Usage(format!(
                "--n {n} does not match the set, which has dimension {}",
                model.dim()
            )));
        }
    }
    Ok(model)
}
