use serde_json::{json, Value};

use tangle_kh::homology::{HomologySummary, LegacyClass};
use tangle_kh::TangleDiagram;

/// The `--json` document of `tangleh homology`; see `schema/homology.schema.json`.
pub fn homology_json(
    summary: &HomologySummary,
    default_signs: bool,
    legacy: Option<&[LegacyClass]>,
    diagram: &TangleDiagram,
) -> Value {
    let homology: Vec<Value> = summary
        .table
        .iter()
        .map(|((k, q), dim)| {
            let generators: Vec<Value> = summary
                .representatives
                .get(&(*k, *q))
                .map(|reps| {
                    reps.iter()
                        .map(|terms| {
                            Value::Array(
                                terms
                                    .iter()
                                    .map(|(g, c)| {
                                        json!({
                                            "state": g.state.to_string(),
                                            "factors": g.labeling.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                                            "coefficient": c,
                                        })
                                    })
                                    .collect(),
                            )
                        })
                        .collect()
                })
                .unwrap_or_default();
            json!({ "k": k, "q": q, "dim": dim, "generators": generators })
        })
        .collect();
    let by_height: Vec<Value> =
        summary.by_height().into_iter().map(|(k, dim)| json!({ "k": k, "dim": dim })).collect();
    let mut doc = json!({
        "n": summary.metadata.n,
        "n_plus": summary.metadata.n_plus,
        "n_minus": summary.metadata.n_minus,
        "field": summary.metadata.field,
        "signs": diagram.sign_type().to_string(),
        "default_signs": default_signs,
        "homology": homology,
        "by_height": by_height,
        "euler": summary.euler().to_string(),
    });
    if let Some(classes) = legacy {
        doc["legacy"] = classes.iter().map(|c| json!({ "k": c.k, "q": c.q })).collect();
    }
    doc
}
