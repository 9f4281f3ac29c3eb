use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Outcome of evaluating a claimed inequality or identity over one or more trials.
///
/// A trial's *margin* is oriented so that a negative value means the claim
/// failed on that trial (for identities the margin is minus the deviation).
/// The witness holds the inputs of the first violating trial together with
/// its margin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub claim_id: String,
    pub trials: u64,
    pub violations: u64,
    /// `+inf` (serialised as `null`) until a trial is evaluated.
    #[serde(with = "nullable_margin")]
    pub worst_margin: f64,
    pub witness: Option<Value>,
    /// For conditional claims: number of trials on which the hypothesis held.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypothesis_incidence: Option<u64>,
}

impl ClaimReport {
    pub fn new(claim_id: impl Into<String>) -> Self {
        ClaimReport {
            claim_id: claim_id.into(),
            trials: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
            witness: None,
            hypothesis_incidence: None,
        }
    }

    /// Records one trial. A margin below `-tolerance` (or NaN) is a violation.
    pub fn record<W: FnOnce() -> Value>(&mut self, margin: f64, tolerance: f64, witness: W) {
        self.trials += 1;
        if margin.is_nan() || margin < self.worst_margin {
            self.worst_margin = margin;
        }
        if margin >= -tolerance {
            return;
        }
        self.violations += 1;
        if self.witness.is_none() {
            let mut w = witness();
            if let Value::Object(map) = &mut w {
                map.insert("margin".into(), Value::from(margin));
            }
            self.witness = Some(w);
        }
    }

    /// Marks one trial where a conditional claim's hypothesis held.
    pub fn hypothesis_held(&mut self) {
        *self.hypothesis_incidence.get_or_insert(0) += 1;
    }

    /// Declares the claim conditional even if no hypothesis has held yet.
    pub fn conditional(mut self) -> Self {
        self.hypothesis_incidence.get_or_insert(0);
        self
    }

    pub fn holds(&self) -> bool {
        self.violations == 0
    }

    /// Associative merge; the earlier report's witness wins.
    pub fn merge(mut self, other: ClaimReport) -> ClaimReport {
        self.trials += other.trials;
        self.violations += other.violations;
        if other.worst_margin.is_nan() || other.worst_margin < self.worst_margin {
            self.worst_margin = other.worst_margin;
        }
        if self.witness.is_none() {
            self.witness = other.witness;
        }
        self.hypothesis_incidence = match (self.hypothesis_incidence, other.hypothesis_incidence) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(0) + b.unwrap_or(0)),
        };
        self
    }

    /// Records a conditional trial; skipped trials count towards `trials` only.
    pub fn merge_trial(&mut self, outcome: TrialOutcome) {
        match outcome {
            TrialOutcome::Skipped => self.trials += 1,
            TrialOutcome::Evaluated {
                margin,
                tolerance,
                witness,
            } => {
                self.hypothesis_held();
                self.record(margin, tolerance, || witness);
            }
        }
    }

    /// Margin stored in the witness, if any.
    pub fn witness_margin(&self) -> Option<f64> {
        self.witness.as_ref()?.get("margin")?.as_f64()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// Result of a single conditional trial.
#[derive(Debug, Clone)]
pub enum TrialOutcome {
    Skipped,
    Evaluated { margin: f64, tolerance: f64, witness: Value },
}

mod nullable_margin {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn record_tracks_worst_and_first_witness() {
        let mut r = ClaimReport::new("x");
        r.record(0.5, 1e-12, || json!({"k": 0}));
        r.record(-0.25, 1e-12, || json!({"k": 1}));
        r.record(-0.5, 1e-12, || json!({"k": 2}));
        r.record(-1e-13, 1e-12, || json!({"k": 3}));
        assert_eq!(r.trials, 4);
        assert_eq!(r.violations, 2);
        assert_eq!(r.worst_margin, -0.5);
        assert_eq!(r.witness.as_ref().unwrap()["k"], 1);
        assert_eq!(r.witness_margin(), Some(-0.25));
    }

    #[test]
    fn merge_is_associative() {
        let mk = |m: f64, k: u64| {
            let mut r = ClaimReport::new("x");
            r.record(m, 0.0, || json!({ "k": k }));
            r
        };
        let (a, b, cc) = (mk(1.0, 0), mk(-2.0, 1), mk(-3.0, 2));
        let left = a.clone().merge(b.clone()).merge(cc.clone());
        let right = a.merge(b.merge(cc));
        assert_eq!(left, right);
        assert_eq!(left.witness.unwrap()["k"], 1);
    }

    #[test]
    fn nan_margin_is_a_violation() {
        let mut r = ClaimReport::new("x");
        r.record(f64::NAN, 1e-12, || json!({}));
        assert_eq!(r.violations, 1);
    }

    #[test]
    fn json_roundtrip_is_exact() {
        let mut r = ClaimReport::new("x");
        r.record(-0.1 - 0.2, 0.0, || json!({"q": [0.1, 1.0 / 3.0]}));
        let back: ClaimReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(!back.to_json().contains("hypothesis_incidence"));
    }

    #[test]
    fn empty_report_roundtrips() {
        let r = ClaimReport::new("x").conditional();
        let back: ClaimReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
