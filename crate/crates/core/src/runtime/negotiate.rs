use super::registry::ProverSpec;
use crate::format::Format;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConversionPlan {
    Direct,
    /// Convert with `filter<from>toFOF` first.
    ViaFilter(Format),
    Unsupported(String),
}

pub fn negotiate_format(spec: &ProverSpec, source: Format) -> ConversionPlan {
    if spec.accepts(source) {
        ConversionPlan::Direct
    } else if source.has_fof_filter() && spec.accepts(Format::Fof) {
        ConversionPlan::ViaFilter(source)
    } else {
        let accepted: Vec<&str> = spec.formats.iter().map(|f| f.name()).collect();
        ConversionPlan::Unsupported(format!(
            "prover `{}` accepts {} and no filter converts {source} to one of them",
            spec.name,
            accepted.join(", ")
        ))
    }
}
