//! Versioned JSON envelope shared by every machine-readable report.
//!
//! ```json
//! { "schema_version": 1, "kind": "verification", "report": { ... }, "notes": [ ... ] }
//! ```
//!
//! `report` holds the serialized report type for `kind`; warnings go to
//! `notes` only, never into `report`.

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    kind: &'a str,
    report: &'a T,
    notes: &'a [String],
}

pub fn envelope_json<T: Serialize>(kind: &str, report: &T, notes: &[String]) -> String {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        kind,
        report,
        notes,
    };
    serde_json::to_string_pretty(&env).expect("reports contain only finite numbers")
}
