use std::io::Read;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use zpg_core::BlockSpec;

/// Parses a spec, naming the offending field and position on failure, then
/// validates it.
pub fn parse_spec(text: &str) -> Result<BlockSpec> {
    let mut de = serde_json::Deserializer::from_str(text);
    let spec: BlockSpec = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            anyhow!("malformed spec: {inner}")
        } else {
            anyhow!("malformed spec at field `{path}`: {inner}")
        }
    })?;
    spec.validate().context("invalid spec")?;
    Ok(spec)
}

/// Reads a spec from a file, or from stdin when `path` is `-`.
pub fn read_spec(path: &Path) -> Result<BlockSpec> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        s
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    parse_spec(&text)
}

pub fn spec_to_json(spec: &BlockSpec) -> String {
    let mut s = serde_json::to_string_pretty(spec).expect("spec serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_field_and_line() {
        let err = parse_spec("{\n \"p\": \"2\",\n \"n\": \"x\"\n}").unwrap_err().to_string();
        assert!(err.contains("`n`") && err.contains("line 3"), "{err}");
    }

    #[test]
    fn names_violated_invariant() {
        let err = parse_spec(r#"{"p":"4","n":"1","multiplicities":["1","0"],"conjugator_seed":"0","conjugator_bound":"1"}"#)
            .unwrap_err();
        assert!(format!("{err:#}").contains("not a prime"), "{err:#}");
        let err = parse_spec(r#"{"p":"3","n":"1","multiplicities":["1"],"conjugator_seed":"0","conjugator_bound":"1"}"#)
            .unwrap_err();
        assert!(format!("{err:#}").contains("multiplicities"), "{err:#}");
    }
}
