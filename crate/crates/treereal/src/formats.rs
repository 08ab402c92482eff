//! On-disk instance formats: one tagged JSON object per file, with a
//! `kind` discriminant. Emission is canonical — fixed key order (struct
//! declaration order) and sorted value lists — so output round-trips
//! bit-exactly through the parsers.

use serde::{Deserialize, Serialize};

use crate::reductions::{EisInstance, KPwTInstance, NmtsInstance, NmtsKInstance, Provenance};
use crate::{Error, Result};

/// Optional per-element depth/height annotations of a size multiset.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotations {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depths: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heights: Option<Vec<u64>>,
}

impl Annotations {
    pub fn is_empty(&self) -> bool {
        self.depths.is_none() && self.heights.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InstanceFile {
    Nmts {
        x: Vec<u64>,
        y: Vec<u64>,
        b: Vec<u64>,
    },
    Nmtsk {
        k: usize,
        sets: Vec<Vec<u64>>,
        b: Vec<u64>,
    },
    Kpwt {
        k: usize,
        sizes: Vec<u64>,
        b: Vec<u64>,
    },
    Sizes {
        k: usize,
        values: Vec<u64>,
        #[serde(default, skip_serializing_if = "Annotations::is_empty")]
        annotations: Annotations,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        provenance: Option<Provenance>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        mutated: bool,
    },
    Heights {
        k: usize,
        values: Vec<u64>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        mutated: bool,
    },
    Depths {
        k: usize,
        values: Vec<u64>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        mutated: bool,
    },
    /// Synchronized (height, depth) records.
    HdSync {
        k: usize,
        pairs: Vec<(u64, u64)>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        mutated: bool,
    },
    /// Synchronized (subtree size, inorder rank) records; binary only.
    SizeItr {
        pairs: Vec<(u64, u64)>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        mutated: bool,
    },
    /// Asynchronized height and depth multisets of equal cardinality.
    HdAsync {
        k: usize,
        heights: Vec<u64>,
        depths: Vec<u64>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        mutated: bool,
    },
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<InstanceFile> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("bad instance file: {e}")))
    }

    /// Serializes with sorted value lists and a trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let mut canon = self.clone();
        canon.sort_values();
        let mut out = serde_json::to_string_pretty(&canon).expect("serializable");
        out.push('\n');
        out
    }

    fn sort_values(&mut self) {
        match self {
            InstanceFile::Nmts { x, y, b } => {
                x.sort_unstable();
                y.sort_unstable();
                let _ = b; // target order is meaningful
            }
            InstanceFile::Nmtsk { sets, .. } => {
                for s in sets.iter_mut() {
                    s.sort_unstable();
                }
            }
            InstanceFile::Kpwt { sizes, .. } => sizes.sort_unstable(),
            InstanceFile::Sizes {
                values,
                annotations,
                provenance,
                ..
            } => {
                // annotations and provenance are element-aligned; sorting
                // would break the correspondence
                if annotations.is_empty() && provenance.is_none() {
                    values.sort_unstable();
                }
            }
            InstanceFile::Heights { values, .. } | InstanceFile::Depths { values, .. } => {
                values.sort_unstable()
            }
            InstanceFile::HdSync { pairs, .. } | InstanceFile::SizeItr { pairs, .. } => {
                pairs.sort_unstable()
            }
            InstanceFile::HdAsync {
                heights, depths, ..
            } => {
                heights.sort_unstable();
                depths.sort_unstable();
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            InstanceFile::Nmts { .. } => "nmts",
            InstanceFile::Nmtsk { .. } => "nmtsk",
            InstanceFile::Kpwt { .. } => "kpwt",
            InstanceFile::Sizes { .. } => "sizes",
            InstanceFile::Heights { .. } => "heights",
            InstanceFile::Depths { .. } => "depths",
            InstanceFile::HdSync { .. } => "hd-sync",
            InstanceFile::SizeItr { .. } => "size-itr",
            InstanceFile::HdAsync { .. } => "hd-async",
        }
    }

    pub fn as_nmts(&self) -> Result<NmtsInstance> {
        match self {
            InstanceFile::Nmts { x, y, b } => Ok(NmtsInstance {
                x: x.clone(),
                y: y.clone(),
                b: b.clone(),
            }),
            other => Err(Error::InvalidInput(format!(
                "expected an nmts instance, got {}",
                other.kind_name()
            ))),
        }
    }

    pub fn as_nmtsk(&self) -> Result<NmtsKInstance> {
        match self {
            InstanceFile::Nmtsk { k, sets, b } => Ok(NmtsKInstance {
                k: *k,
                sets: sets.clone(),
                b: b.clone(),
            }),
            other => Err(Error::InvalidInput(format!(
                "expected an nmtsk instance, got {}",
                other.kind_name()
            ))),
        }
    }

    pub fn as_kpwt(&self) -> Result<KPwTInstance> {
        match self {
            InstanceFile::Kpwt { k, sizes, b } => Ok(KPwTInstance {
                k: *k,
                sizes: sizes.clone(),
                b: b.clone(),
            }),
            other => Err(Error::InvalidInput(format!(
                "expected a kpwt instance, got {}",
                other.kind_name()
            ))),
        }
    }

    pub fn as_eis(&self) -> Result<EisInstance> {
        match self {
            InstanceFile::Sizes {
                k,
                values,
                annotations,
                provenance,
                ..
            } => Ok(EisInstance {
                k: *k,
                values: values.clone(),
                depths: annotations.depths.clone(),
                heights: annotations.heights.clone(),
                provenance: provenance.clone(),
            }),
            other => Err(Error::InvalidInput(format!(
                "expected a sizes instance, got {}",
                other.kind_name()
            ))),
        }
    }
}

impl From<&EisInstance> for InstanceFile {
    fn from(inst: &EisInstance) -> InstanceFile {
        InstanceFile::Sizes {
            k: inst.k,
            values: inst.values.clone(),
            annotations: Annotations {
                depths: inst.depths.clone(),
                heights: inst.heights.clone(),
            },
            provenance: inst.provenance.clone(),
            mutated: false,
        }
    }
}

impl From<&NmtsInstance> for InstanceFile {
    fn from(inst: &NmtsInstance) -> InstanceFile {
        InstanceFile::Nmts {
            x: inst.x.clone(),
            y: inst.y.clone(),
            b: inst.b.clone(),
        }
    }
}

impl From<&NmtsKInstance> for InstanceFile {
    fn from(inst: &NmtsKInstance) -> InstanceFile {
        InstanceFile::Nmtsk {
            k: inst.k,
            sets: inst.sets.clone(),
            b: inst.b.clone(),
        }
    }
}

impl From<&KPwTInstance> for InstanceFile {
    fn from(inst: &KPwTInstance) -> InstanceFile {
        InstanceFile::Kpwt {
            k: inst.k,
            sizes: inst.sizes.clone(),
            b: inst.b.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reductions::{kpwt_to_eis, Annotate, Variant};

    #[test]
    fn tagged_kinds_parse() {
        let f = InstanceFile::from_json(r#"{"kind":"nmts","x":[1],"y":[2],"b":[3]}"#).unwrap();
        assert_eq!(f.kind_name(), "nmts");
        assert_eq!(f.as_nmts().unwrap().b, vec![3]);

        let f = InstanceFile::from_json(
            r#"{"kind":"nmtsk","k":3,"sets":[[1],[2],[1]],"b":[5]}"#,
        )
        .unwrap();
        assert_eq!(f.as_nmtsk().unwrap().k, 3);

        let f = InstanceFile::from_json(r#"{"kind":"sizes","k":2,"values":[3,1,1]}"#).unwrap();
        let eis = f.as_eis().unwrap();
        assert_eq!(eis.values, vec![3, 1, 1]);
        assert!(eis.depths.is_none());

        let f = InstanceFile::from_json(r#"{"kind":"hd-sync","k":2,"pairs":[[1,0],[0,1]]}"#)
            .unwrap();
        assert_eq!(f.kind_name(), "hd-sync");

        assert!(InstanceFile::from_json(r#"{"kind":"bogus"}"#).is_err());
        assert!(f.as_kpwt().is_err());
    }

    #[test]
    fn canonical_output_round_trips_bit_exactly() {
        let samples = [
            r#"{"kind":"nmts","x":[2,1],"y":[4,3],"b":[5,5]}"#,
            r#"{"kind":"kpwt","k":2,"sizes":[38,7],"b":[45]}"#,
            r#"{"kind":"sizes","k":2,"values":[9,1,7,1,1,3,1,2,3]}"#,
            r#"{"kind":"heights","k":2,"values":[2,0,1,0],"mutated":true}"#,
            r#"{"kind":"size-itr","pairs":[[3,2],[1,1],[1,3]]}"#,
            r#"{"kind":"hd-async","k":2,"heights":[1,1,0,0],"depths":[2,1,1,0]}"#,
        ];
        for text in samples {
            let parsed = InstanceFile::from_json(text).unwrap();
            let emitted = parsed.to_canonical_json();
            let reparsed = InstanceFile::from_json(&emitted).unwrap();
            assert_eq!(reparsed.to_canonical_json(), emitted);
        }
    }

    #[test]
    fn annotated_instances_keep_element_alignment() {
        let kpwt = KPwTInstance {
            k: 2,
            sizes: vec![7, 38],
            b: vec![45],
        };
        let eis = kpwt_to_eis(&kpwt, Variant::Plain, Annotate::Both, None).unwrap();
        let file = InstanceFile::from(&eis);
        let text = file.to_canonical_json();
        let back = InstanceFile::from_json(&text).unwrap().as_eis().unwrap();
        assert_eq!(back, eis);
        assert_eq!(back.to_owned().depths.unwrap().len(), eis.values.len());
    }

    #[test]
    fn provenance_survives_round_trip() {
        let kpwt = KPwTInstance {
            k: 2,
            sizes: vec![7, 38],
            b: vec![45],
        };
        let eis = kpwt_to_eis(&kpwt, Variant::Full, Annotate::None, None).unwrap();
        let text = InstanceFile::from(&eis).to_canonical_json();
        let back = InstanceFile::from_json(&text).unwrap().as_eis().unwrap();
        assert_eq!(back.provenance, eis.provenance);
        back.check_structure().unwrap();
    }
}
