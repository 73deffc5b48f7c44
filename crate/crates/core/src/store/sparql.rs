//! SPARQL 1.1 protocol client used in external mode.

use std::time::Duration;

use serde_json::Value;

use super::{Backend, StoreError, StoreResult};
use crate::rdf::{Term, Triple};

pub struct SparqlBackend {
    endpoint: String,
    agent: ureq::Agent,
}

impl SparqlBackend {
    pub fn new(endpoint: &str) -> SparqlBackend {
        SparqlBackend {
            endpoint: endpoint.trim_end_matches('/').to_string(),
            agent: ureq::AgentBuilder::new()
                .timeout(Duration::from_secs(30))
                .build(),
        }
    }

    fn post(&self, content_type: &str, accept: &str, body: &str) -> StoreResult<ureq::Response> {
        self.agent
            .post(&self.endpoint)
            .set("Content-Type", content_type)
            .set("Accept", accept)
            .send_string(body)
            .map_err(|e| match e {
                ureq::Error::Status(code, _) => {
                    StoreError::EndpointUnreachable(format!("endpoint answered {code}"))
                }
                other => StoreError::EndpointUnreachable(other.to_string()),
            })
    }

    fn update(&self, update: &str) -> StoreResult<()> {
        self.post("application/sparql-update", "*/*", update).map(drop)
    }

    fn select(&self, query: &str) -> StoreResult<Vec<serde_json::Map<String, Value>>> {
        let resp = self.post(
            "application/sparql-query",
            "application/sparql-results+json",
            query,
        )?;
        let text = resp
            .into_string()
            .map_err(|e| StoreError::EndpointUnreachable(e.to_string()))?;
        let body: Value = serde_json::from_str(&text)
            .map_err(|e| StoreError::EndpointUnreachable(format!("bad results document: {e}")))?;
        let rows = body
            .pointer("/results/bindings")
            .and_then(Value::as_array)
            .ok_or_else(|| StoreError::EndpointUnreachable("results document has no bindings".into()))?;
        Ok(rows
            .iter()
            .filter_map(|r| r.as_object().cloned())
            .collect())
    }
}

/// Reads one binding of a `application/sparql-results+json` row.
pub(crate) fn json_term(row: &serde_json::Map<String, Value>, var: &str) -> Option<Term> {
    let b = row.get(var)?;
    let value = b.get("value")?.as_str()?.to_string();
    match b.get("type")?.as_str()? {
        "uri" => Some(Term::Iri(value)),
        "bnode" => Some(Term::Blank(value)),
        "literal" | "typed-literal" => {
            if let Some(lang) = b.get("xml:lang").and_then(Value::as_str) {
                Some(Term::lang(value, lang))
            } else if let Some(dt) = b.get("datatype").and_then(Value::as_str) {
                Some(Term::typed(value, dt))
            } else {
                Some(Term::literal(value))
            }
        }
        _ => None,
    }
}

/// SPARQL string literal for `s`; N-Triples escaping is valid SPARQL.
fn sparql_string(s: &str) -> String {
    Term::literal(s).to_string()
}

fn iri(s: &str) -> String {
    Term::iri(s).to_string()
}

impl Backend for SparqlBackend {
    fn add(&self, triple: &Triple) -> StoreResult<bool> {
        self.update(&format!("INSERT DATA {{ {triple} }}"))?;
        Ok(true)
    }

    fn by_subject(&self, subject: &str) -> StoreResult<Vec<Triple>> {
        let rows = self.select(&format!("SELECT ?p ?o WHERE {{ {} ?p ?o }}", iri(subject)))?;
        Ok(rows
            .iter()
            .filter_map(|r| {
                let p = json_term(r, "p")?;
                Some(Triple::new(Term::iri(subject), p.as_iri()?, json_term(r, "o")?))
            })
            .collect())
    }

    fn literal_matches(&self, needle_lower: &str) -> StoreResult<Vec<Triple>> {
        let rows = self.select(&format!(
            "SELECT ?s ?p ?o WHERE {{ ?s ?p ?o . FILTER(isLiteral(?o) && CONTAINS(LCASE(STR(?o)), {})) }}",
            sparql_string(needle_lower)
        ))?;
        Ok(rows.iter().filter_map(row_triple).collect())
    }

    fn subjects_with(&self, predicate: &str, object_iri: &str) -> StoreResult<Vec<String>> {
        let rows = self.select(&format!(
            "SELECT ?s WHERE {{ ?s {} {} }}",
            iri(predicate),
            iri(object_iri)
        ))?;
        Ok(rows
            .iter()
            .filter_map(|r| json_term(r, "s")?.as_iri().map(str::to_string))
            .collect())
    }

    fn all(&self) -> StoreResult<Vec<Triple>> {
        let rows = self.select("SELECT ?s ?p ?o WHERE { ?s ?p ?o }")?;
        Ok(rows.iter().filter_map(row_triple).collect())
    }
}

fn row_triple(r: &serde_json::Map<String, Value>) -> Option<Triple> {
    let p = json_term(r, "p")?;
    Some(Triple::new(json_term(r, "s")?, p.as_iri()?, json_term(r, "o")?))
}
