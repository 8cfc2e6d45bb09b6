//! JSON shapes for the core domain objects.
//!
//! Model descriptors flatten to `{kind, params, dim, energies[]}`; Kraus
//! sets nest complex entries as `[re, im]` pairs and round-trip exactly,
//! since the JSON number writer emits shortest-round-trip doubles.

use crate::{CmdFail, CmdResult};
use serde_json::{Map, Value};
use slp_core::channels::KrausSet;
use slp_core::models::{ModelKind, SpinModel};
use slp_core::qcore::{cplx, CMatrix};

/// Descriptor of a model: `{kind, params, dim, energies[]}`.
pub fn model_to_json(model: &SpinModel) -> Value {
    let mut params = Map::new();
    let kind = match model.kind() {
        ModelKind::Pair { kappa, gamma } => {
            params.insert("kappa".into(), Value::from(*kappa));
            params.insert("gamma".into(), Value::from(*gamma));
            "pair"
        }
        ModelKind::Chain { n, kappa } => {
            params.insert("n".into(), Value::from(*n as u64));
            params.insert("kappa".into(), Value::from(*kappa));
            "chain"
        }
        ModelKind::Exchange => "xxx",
        ModelKind::Custom => {
            params.insert("d_control".into(), Value::from(model.d_control() as u64));
            params.insert("d_rest".into(), Value::from(model.d_rest() as u64));
            "custom"
        }
    };
    let mut root = Map::new();
    root.insert("kind".into(), Value::from(kind));
    root.insert("params".into(), Value::Object(params));
    root.insert("dim".into(), Value::from(model.dim() as u64));
    root.insert(
        "energies".into(),
        Value::from(model.energies().iter().map(|e| Value::from(*e)).collect::<Vec<_>>()),
    );
    Value::Object(root)
}

/// Kraus operators as nested `[re, im]` pairs: a list of matrices, each a
/// row-major list of rows.
pub fn kraus_to_json(channel: &KrausSet) -> Value {
    let ops: Vec<Value> = channel
        .ops()
        .iter()
        .map(|k| {
            let rows: Vec<Value> = (0..k.nrows())
                .map(|i| {
                    let row: Vec<Value> = (0..k.ncols())
                        .map(|j| Value::from(vec![k[(i, j)].re, k[(i, j)].im]))
                        .collect();
                    Value::from(row)
                })
                .collect();
            Value::from(rows)
        })
        .collect();
    Value::from(ops)
}

/// Inverse of [`kraus_to_json`]; validates completeness on reconstruction.
pub fn kraus_from_json(v: &Value) -> CmdResult<KrausSet> {
    let ops_json = v.as_array().ok_or_else(|| CmdFail::config("kraus json: expected an array"))?;
    let mut ops = Vec::with_capacity(ops_json.len());
    for op in ops_json {
        let rows = op.as_array().ok_or_else(|| CmdFail::config("kraus json: operator must be an array of rows"))?;
        let nrows = rows.len();
        let ncols = rows
            .first()
            .and_then(|r| r.as_array())
            .map(|r| r.len())
            .ok_or_else(|| CmdFail::config("kraus json: empty operator"))?;
        let mut m = CMatrix::zeros(nrows, ncols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_array().filter(|r| r.len() == ncols).ok_or_else(|| {
                CmdFail::config("kraus json: ragged operator rows")
            })?;
            for (j, entry) in row.iter().enumerate() {
                let pair = entry.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
                    CmdFail::config("kraus json: entries must be [re, im] pairs")
                })?;
                let re = pair[0].as_f64().ok_or_else(|| CmdFail::config("kraus json: non-numeric entry"))?;
                let im = pair[1].as_f64().ok_or_else(|| CmdFail::config("kraus json: non-numeric entry"))?;
                m[(i, j)] = cplx(re, im);
            }
        }
        ops.push(m);
    }
    Ok(KrausSet::new(ops)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_descriptor_has_the_agreed_shape() {
        let model = SpinModel::pair(2.0, 0.5).unwrap();
        let v = model_to_json(&model);
        assert_eq!(v["kind"], "pair");
        assert_eq!(v["params"]["kappa"].as_f64().unwrap(), 2.0);
        assert_eq!(v["dim"].as_u64().unwrap(), 4);
        assert_eq!(v["energies"].as_array().unwrap().len(), 4);
        let chain = SpinModel::chain(3, 1.0).unwrap();
        assert_eq!(model_to_json(&chain)["kind"], "chain");
        assert_eq!(model_to_json(&SpinModel::exchange())["kind"], "xxx");
    }

    #[test]
    fn kraus_round_trip_is_bit_exact() {
        for seed in [3u64, 19, 101] {
            let ks = KrausSet::random(2, 3, seed);
            let v = kraus_to_json(&ks);
            let back = kraus_from_json(&v).unwrap();
            assert_eq!(back.num_ops(), ks.num_ops());
            for (a, b) in ks.ops().iter().zip(back.ops().iter()) {
                for (x, y) in a.iter().zip(b.iter()) {
                    assert_eq!(x.re.to_bits(), y.re.to_bits());
                    assert_eq!(x.im.to_bits(), y.im.to_bits());
                }
            }
        }
    }

    #[test]
    fn kraus_rejects_malformed_input() {
        assert!(kraus_from_json(&Value::from("x")).is_err());
        let not_complete = serde_json::json!([[[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]]);
        assert!(kraus_from_json(&not_complete).is_err());
    }
}
