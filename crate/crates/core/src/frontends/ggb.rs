//! GeoGebra construction XML subset.
//!
//! Inside `<construction>`, items are read in document order:
//!
//! - `<element type="point" label="A"/>` declares a free point, unless the
//!   label is already the output of a command. Child elements such as
//!   `<coords>` are ignored. Elements of type `line`, `segment`, `conic` or
//!   `boolean` only describe command outputs and must name one.
//! - `<command name="...">` with `<input a0=".." .../>` and `<output a0=".."/>`.
//!   Supported commands: `Midpoint[A,B]`, `Line[A,B]`, `Segment[A,B]`,
//!   `Intersect[l,m]` (two lines), `ClosestPoint[l,P]` (foot of P on l),
//!   `Circle[A,B,C]`, `Center[c]` (for a three-point circle) and `Prove[..]`.
//! - The goal is `<command name="Prove">` whose `a0` is
//!   `AreCollinear[A,B,C]`, `AreParallel[..]`, `ArePerpendicular[..]` or
//!   `AreCongruent[..]`. The last three take four points or two
//!   line/segment labels.

use std::collections::HashMap;

use roxmltree::{Document, Node};

use super::model::{Builder, FrontendError, GeoConjecture, GoalPredicate, StepKind};

#[derive(Clone)]
enum Object {
    /// A line or segment through two points.
    Line(String, String),
    /// A circle through three points.
    Circle(String, String, String),
    /// Output of `Prove`.
    Boolean,
}

struct Reader<'a> {
    text: &'a str,
    b: Builder,
    objects: HashMap<String, Object>,
}

impl<'a> Reader<'a> {
    fn line_of(&self, node: Node) -> usize {
        self.text[..node.range().start].matches('\n').count() + 1
    }

    fn syntax(&self, node: Node, message: impl Into<String>) -> FrontendError {
        FrontendError::Syntax { line: self.line_of(node), message: message.into() }
    }

    fn args(&self, node: Node, tag: &str) -> Result<Vec<String>, FrontendError> {
        let Some(el) = node.children().find(|c| c.has_tag_name(tag)) else {
            return Ok(Vec::new());
        };
        let mut out = Vec::new();
        for i in 0.. {
            match el.attribute(format!("a{i}").as_str()) {
                Some(v) => out.push(v.trim().to_string()),
                None => break,
            }
        }
        if el.attributes().count() != out.len() {
            return Err(self.syntax(el, format!("<{tag}> attributes must be a0, a1, ... without gaps")));
        }
        Ok(out)
    }

    fn line(&self, node: Node, label: &str) -> Result<(String, String), FrontendError> {
        match self.objects.get(label) {
            Some(Object::Line(a, b)) => Ok((a.clone(), b.clone())),
            _ => Err(self.syntax(node, format!("`{label}` is not a line or segment"))),
        }
    }

    fn single_output(&self, node: Node, name: &str, outputs: &[String]) -> Result<String, FrontendError> {
        match outputs {
            [o] => Ok(o.clone()),
            _ => Err(self.syntax(node, format!("{name} must have exactly one output"))),
        }
    }

    fn command(&mut self, node: Node) -> Result<(), FrontendError> {
        let line = self.line_of(node);
        let name = node.attribute("name").ok_or_else(|| self.syntax(node, "command without a name"))?;
        let inputs = self.args(node, "input")?;
        let outputs = self.args(node, "output")?;
        let ins: Vec<&str> = inputs.iter().map(String::as_str).collect();
        match name {
            "Midpoint" => {
                let out = self.single_output(node, name, &outputs)?;
                self.b.step(line, StepKind::Midpoint, &out, &ins)?;
            }
            "Line" | "Segment" => {
                let out = self.single_output(node, name, &outputs)?;
                let [a, b] = ins.as_slice() else {
                    return Err(self.syntax(node, format!("{name} takes two points")));
                };
                for p in [a, b] {
                    if !self.b.is_declared(p) {
                        return Err(FrontendError::Undeclared { line, label: p.to_string() });
                    }
                }
                self.define(node, &out, Object::Line(a.to_string(), b.to_string()))?;
            }
            "Circle" => {
                let out = self.single_output(node, name, &outputs)?;
                let [a, b, c] = ins.as_slice() else {
                    return Err(self.syntax(node, "only the three-point Circle[A,B,C] is supported"));
                };
                for p in [a, b, c] {
                    if !self.b.is_declared(p) {
                        return Err(FrontendError::Undeclared { line, label: p.to_string() });
                    }
                }
                self.define(node, &out, Object::Circle(a.to_string(), b.to_string(), c.to_string()))?;
            }
            "Center" => {
                let out = self.single_output(node, name, &outputs)?;
                let [c] = ins.as_slice() else {
                    return Err(self.syntax(node, "Center takes one circle"));
                };
                let Some(Object::Circle(a, b, c)) = self.objects.get(*c).cloned() else {
                    return Err(self.syntax(node, format!("`{c}` is not a three-point circle")));
                };
                self.b.step(line, StepKind::CircleCenter3, &out, &[&a, &b, &c])?;
            }
            "Intersect" => {
                let out = self.single_output(node, name, &outputs)?;
                let [l, m] = ins.as_slice() else {
                    return Err(self.syntax(node, "Intersect takes two lines"));
                };
                let (a, b) = self.line(node, l)?;
                let (c, d) = self.line(node, m)?;
                self.b.step(line, StepKind::IntersectLines, &out, &[&a, &b, &c, &d])?;
            }
            "ClosestPoint" => {
                let out = self.single_output(node, name, &outputs)?;
                let [l, p] = ins.as_slice() else {
                    return Err(self.syntax(node, "ClosestPoint takes a line and a point"));
                };
                let (a, b) = self.line(node, l)?;
                self.b.step(line, StepKind::Foot, &out, &[p, &a, &b])?;
            }
            "Prove" => {
                let [statement] = ins.as_slice() else {
                    return Err(self.syntax(node, "Prove takes one statement"));
                };
                self.prove(node, statement)?;
                for o in &outputs {
                    self.objects.insert(o.clone(), Object::Boolean);
                }
            }
            other => return Err(FrontendError::UnknownCommand { line, name: other.to_string() }),
        }
        Ok(())
    }

    fn define(&mut self, node: Node, label: &str, obj: Object) -> Result<(), FrontendError> {
        if self.objects.contains_key(label) || self.b.is_declared(label) {
            return Err(FrontendError::Duplicate { line: self.line_of(node), label: label.to_string() });
        }
        self.objects.insert(label.to_string(), obj);
        Ok(())
    }

    fn prove(&mut self, node: Node, statement: &str) -> Result<(), FrontendError> {
        let line = self.line_of(node);
        let (head, rest) = statement
            .split_once('[')
            .ok_or_else(|| self.syntax(node, format!("cannot read Prove statement `{statement}`")))?;
        let body = rest
            .strip_suffix(']')
            .ok_or_else(|| self.syntax(node, format!("cannot read Prove statement `{statement}`")))?;
        let args: Vec<String> = body.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
        let predicate = match head.trim() {
            "AreCollinear" => GoalPredicate::Collinear,
            "AreParallel" => GoalPredicate::Parallel,
            "ArePerpendicular" => GoalPredicate::Perpendicular,
            "AreCongruent" => GoalPredicate::Congruent,
            other => return Err(self.syntax(node, format!("unsupported Prove statement `{other}`"))),
        };
        let points: Vec<String> = if predicate != GoalPredicate::Collinear && args.len() == 2 {
            let (a, b) = self.line(node, &args[0])?;
            let (c, d) = self.line(node, &args[1])?;
            vec![a, b, c, d]
        } else {
            args
        };
        let refs: Vec<&str> = points.iter().map(String::as_str).collect();
        self.b.goal(line, predicate, &refs)
    }

    fn element(&mut self, node: Node) -> Result<(), FrontendError> {
        let line = self.line_of(node);
        let kind = node.attribute("type").unwrap_or("");
        let label = node.attribute("label").ok_or_else(|| self.syntax(node, "element without a label"))?;
        match kind {
            "point" => {
                if !self.b.is_declared(label) {
                    self.b.step(line, StepKind::FreePoint, label, &[])?;
                }
                Ok(())
            }
            "line" | "segment" | "conic" | "boolean" => {
                if self.objects.contains_key(label) {
                    Ok(())
                } else {
                    Err(self.syntax(node, format!("{kind} `{label}` is not the output of a supported command")))
                }
            }
            other => Err(self.syntax(node, format!("unsupported element type `{other}`"))),
        }
    }
}

pub fn parse_ggb_xml(text: &str) -> Result<GeoConjecture, FrontendError> {
    let doc = Document::parse(text).map_err(|e| FrontendError::Xml(e.to_string()))?;
    let root = doc.root_element();
    let construction = if root.has_tag_name("construction") {
        root
    } else {
        root.children()
            .find(|c| c.has_tag_name("construction"))
            .ok_or_else(|| FrontendError::Xml("no <construction> element".into()))?
    };
    let mut r = Reader { text, b: Builder::default(), objects: HashMap::new() };
    for node in construction.children().filter(Node::is_element) {
        match node.tag_name().name() {
            "element" => r.element(node)?,
            "command" => r.command(node)?,
            other => return Err(r.syntax(node, format!("unsupported construction item <{other}>"))),
        }
    }
    let name = construction.attribute("title").unwrap_or("conjecture");
    r.b.finish(name)
}
