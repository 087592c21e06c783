//! Wire messages: one JSON object per line in each direction.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::store::valid_id;
use crate::format::Format;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryRequest {
    Get { id: String, format: Format },
    List,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    NotFound,
    BadRequest,
    Internal,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::NotFound => "not_found",
            ErrorCode::BadRequest => "bad_request",
            ErrorCode::Internal => "internal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResponseStatus {
    Ok,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryResponse {
    pub status: ResponseStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub content: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ids: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<ErrorCode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl QueryResponse {
    fn empty(status: ResponseStatus) -> Self {
        QueryResponse { status, id: None, format: None, content: None, ids: None, code: None, message: None }
    }

    pub fn problem(id: &str, format: Format, content: String) -> Self {
        QueryResponse { id: Some(id.into()), format: Some(format), content: Some(content), ..Self::empty(ResponseStatus::Ok) }
    }

    pub fn list(ids: Vec<String>) -> Self {
        QueryResponse { ids: Some(ids), ..Self::empty(ResponseStatus::Ok) }
    }

    pub fn error(code: ErrorCode, message: impl Into<String>) -> Self {
        QueryResponse { code: Some(code), message: Some(message.into()), ..Self::empty(ResponseStatus::Error) }
    }

    /// Serialized form without the trailing newline.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("response serializes")
    }
}

impl QueryRequest {
    pub fn to_line(&self) -> String {
        match self {
            QueryRequest::Get { id, format } => serde_json::json!({"op": "get", "id": id, "format": format}),
            QueryRequest::List => serde_json::json!({"op": "list"}),
        }
        .to_string()
    }

    /// Decodes one request line; errors are `bad_request` messages.
    pub fn decode(line: &[u8]) -> Result<Self, String> {
        let text = std::str::from_utf8(line).map_err(|_| "request is not valid UTF-8".to_string())?;
        let value: Value = serde_json::from_str(text).map_err(|e| format!("request is not JSON: {e}"))?;
        let Value::Object(obj) = value else {
            return Err("request must be a JSON object".into());
        };
        if let Some(k) = obj.keys().find(|k| !matches!(k.as_str(), "op" | "id" | "format")) {
            return Err(format!("unknown field `{k}`"));
        }
        let str_field = |name: &str| -> Result<Option<&str>, String> {
            match obj.get(name) {
                None | Some(Value::Null) => Ok(None),
                Some(Value::String(s)) => Ok(Some(s)),
                Some(_) => Err(format!("`{name}` must be a string")),
            }
        };
        let op = str_field("op")?.ok_or("missing `op`")?;
        let id = str_field("id")?;
        let format = str_field("format")?;
        match op {
            "list" => {
                if id.is_some() || format.is_some() {
                    return Err("`list` takes no id or format".into());
                }
                Ok(QueryRequest::List)
            }
            "get" => {
                let id = id.ok_or("`get` needs an `id`")?;
                if !valid_id(id) {
                    return Err(format!("`{id}` is not a problem id"));
                }
                let format = match format {
                    Some(f) => f.parse::<Format>()?,
                    None => Format::Fof,
                };
                Ok(QueryRequest::Get { id: id.to_string(), format })
            }
            other => Err(format!("unknown op `{other}`")),
        }
    }
}
