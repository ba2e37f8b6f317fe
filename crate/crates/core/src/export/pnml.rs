use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use sha2::{Digest, Sha256};

use crate::error::ExportError;
use crate::module::{Module, NodeId};
use crate::net::validate_net;

pub const PNML_NS: &str = "http://www.pnml.org/version-2009/grammar/pnml";
pub const PTNET_TYPE: &str = "http://www.pnml.org/version-2009/grammar/ptnet";
pub const TOOL: &str = "netmod";

const MAX_ID_LEN: usize = 64;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn sanitize(id: &NodeId) -> String {
    let mut out = String::new();
    for (i, a) in id.atoms().iter().enumerate() {
        if i > 0 {
            out.push_str("__");
        }
        for c in format!("{}.{}", a.name, a.instance).chars() {
            match c {
                'A'..='Z' | 'a'..='z' | '0'..='9' | '_' | '.' => out.push(c),
                '#' | '-' => out.push('-'),
                _ => out.push('_'),
            }
        }
    }
    out
}

fn hashed(id: &NodeId) -> String {
    let digest = Sha256::digest(id.to_string().as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// XML ids for the nodes of `m`: `p-`/`t-` plus the sanitized atom list, or
/// plus a digest when that is too long or collides.
pub fn pnml_ids(m: &Module) -> BTreeMap<NodeId, String> {
    let mut used = BTreeSet::new();
    let mut out = BTreeMap::new();
    for (id, n) in m.nodes() {
        let prefix = match n.kind {
            crate::module::NodeKind::Place => "p-",
            crate::module::NodeKind::Transition => "t-",
            crate::module::NodeKind::Abstract => "x-",
        };
        let mut s = format!("{prefix}{}", sanitize(id));
        if s.len() > MAX_ID_LEN || used.contains(&s) {
            s = format!("{prefix}h{}", hashed(id));
        }
        used.insert(s.clone());
        out.insert(id.clone(), s);
    }
    out
}

/// PNML 2009 place/transition net with one page. The mapping from XML ids
/// to node ids is kept in a `toolspecific` block.
pub fn to_pnml(m: &Module) -> Result<String, ExportError> {
    let net = validate_net(m)?;
    let ids = pnml_ids(m);
    let name = m.name().unwrap_or("net");
    let mut x = String::new();
    x.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(x, "<pnml xmlns=\"{PNML_NS}\">");
    let _ = writeln!(x, "  <net id=\"net\" type=\"{PTNET_TYPE}\">");
    let _ = writeln!(x, "    <name><text>{}</text></name>", escape(name));
    x.push_str("    <page id=\"page\">\n");
    for p in net.places() {
        let _ = write!(
            x,
            "      <place id=\"{}\"><name><text>{}</text></name>",
            ids[p],
            escape(net.label(p).as_str())
        );
        if let Some(&k) = net.marking().get(p) {
            let _ = write!(x, "<initialMarking><text>{k}</text></initialMarking>");
        }
        x.push_str("</place>\n");
    }
    for t in net.transitions() {
        let _ = writeln!(
            x,
            "      <transition id=\"{}\"><name><text>{}</text></name></transition>",
            ids[t],
            escape(net.label(t).as_str())
        );
    }
    for (i, (a, b)) in net.flow().iter().enumerate() {
        let _ = writeln!(
            x,
            "      <arc id=\"a{}\" source=\"{}\" target=\"{}\"/>",
            i + 1,
            ids[a],
            ids[b]
        );
    }
    x.push_str("    </page>\n");
    let _ = writeln!(
        x,
        "    <toolspecific tool=\"{TOOL}\" version=\"{}\">",
        env!("CARGO_PKG_VERSION")
    );
    for (id, xml_id) in &ids {
        let _ = writeln!(
            x,
            "      <node id=\"{}\" atoms=\"{}\"/>",
            xml_id,
            escape(&id.to_string())
        );
    }
    x.push_str("    </toolspecific>\n  </net>\n</pnml>\n");
    Ok(x)
}

/// Counts reported by [`check_pnml`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PnmlSummary {
    pub places: usize,
    pub transitions: usize,
    pub arcs: usize,
}

fn elems<'a, 'i>(n: roxmltree::Node<'a, 'i>) -> Vec<roxmltree::Node<'a, 'i>> {
    n.children().filter(|c| c.is_element()).collect()
}

fn is_ncname(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_alphabetic() || c == '_')
        && cs.all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// Structural check of a PNML place/transition document: namespace, net
/// type, page nesting, unique ids, arcs between a place and a transition,
/// and non-negative integer markings.
pub fn check_pnml(xml: &str) -> Result<PnmlSummary, ExportError> {
    let bad = |m: String| Err(ExportError::InvalidPnml(m));
    let doc =
        roxmltree::Document::parse(xml).map_err(|e| ExportError::InvalidPnml(e.to_string()))?;
    let root = doc.root_element();
    if root.tag_name().name() != "pnml" || root.tag_name().namespace() != Some(PNML_NS) {
        return bad("root element must be pnml in the PNML 2009 namespace".into());
    }
    let nets = elems(root);
    if nets.is_empty() {
        return bad("no net".into());
    }
    let mut ids = BTreeSet::new();
    let mut kinds: BTreeMap<String, &str> = BTreeMap::new();
    let mut arcs = Vec::new();
    let mut sum = PnmlSummary::default();

    let check_name = |n: roxmltree::Node<'_, '_>| -> Result<(), ExportError> {
        let kids = elems(n);
        if kids.len() != 1 || kids[0].tag_name().name() != "text" {
            return Err(ExportError::InvalidPnml(
                "name needs exactly one text child".into(),
            ));
        }
        Ok(())
    };

    for net in nets {
        if net.tag_name().name() != "net" {
            return bad(format!(
                "unexpected element {} under pnml",
                net.tag_name().name()
            ));
        }
        if net.attribute("type") != Some(PTNET_TYPE) {
            return bad("net type must be the ptnet grammar".into());
        }
        let Some(id) = net.attribute("id") else {
            return bad("net without id".into());
        };
        if !is_ncname(id) || !ids.insert(id.to_owned()) {
            return bad(format!("bad or duplicate id {id}"));
        }
        let mut pages = 0;
        let mut stack = Vec::new();
        for c in elems(net) {
            match c.tag_name().name() {
                "name" => check_name(c)?,
                "page" => {
                    pages += 1;
                    stack.push(c);
                }
                "toolspecific" => {
                    if c.attribute("tool").is_none() || c.attribute("version").is_none() {
                        return bad("toolspecific needs tool and version".into());
                    }
                }
                other => return bad(format!("unexpected element {other} under net")),
            }
        }
        if pages == 0 {
            return bad("net without page".into());
        }
        while let Some(page) = stack.pop() {
            let Some(pid) = page.attribute("id") else {
                return bad("page without id".into());
            };
            if !is_ncname(pid) || !ids.insert(pid.to_owned()) {
                return bad(format!("bad or duplicate id {pid}"));
            }
            for c in elems(page) {
                let tag = c.tag_name().name();
                match tag {
                    "name" => {
                        check_name(c)?;
                        continue;
                    }
                    "toolspecific" | "graphics" => continue,
                    "page" => {
                        stack.push(c);
                        continue;
                    }
                    "place" | "transition" | "arc" | "referencePlace" | "referenceTransition" => {}
                    other => return bad(format!("unexpected element {other} on page")),
                }
                let Some(id) = c.attribute("id") else {
                    return bad(format!("{tag} without id"));
                };
                if !is_ncname(id) || !ids.insert(id.to_owned()) {
                    return bad(format!("bad or duplicate id {id}"));
                }
                for k in elems(c) {
                    match (tag, k.tag_name().name()) {
                        (_, "name") => check_name(k)?,
                        (_, "toolspecific" | "graphics") => {}
                        ("place", "initialMarking") | ("arc", "inscription") => {
                            let t: Vec<_> = elems(k)
                                .into_iter()
                                .filter(|e| e.tag_name().name() == "text")
                                .collect();
                            let ok = t.len() == 1
                                && t[0].text().is_some_and(|s| s.trim().parse::<u64>().is_ok());
                            if !ok {
                                return bad(format!("{id}: expected a non-negative integer"));
                            }
                        }
                        (_, other) => {
                            return bad(format!("unexpected element {other} in {tag} {id}"))
                        }
                    }
                }
                match tag {
                    "place" => {
                        sum.places += 1;
                        kinds.insert(id.to_owned(), "place");
                    }
                    "transition" => {
                        sum.transitions += 1;
                        kinds.insert(id.to_owned(), "transition");
                    }
                    "arc" => {
                        let (Some(s), Some(t)) = (c.attribute("source"), c.attribute("target"))
                        else {
                            return bad(format!("arc {id} needs source and target"));
                        };
                        arcs.push((id.to_owned(), s.to_owned(), t.to_owned()));
                        sum.arcs += 1;
                    }
                    _ => return bad(format!("{tag} is not supported")),
                }
            }
        }
    }
    for (id, s, t) in arcs {
        match (kinds.get(&s), kinds.get(&t)) {
            (Some(a), Some(b)) if a != b => {}
            (None, _) | (_, None) => return bad(format!("arc {id} has a dangling end")),
            _ => return bad(format!("arc {id} joins two nodes of the same kind")),
        }
    }
    Ok(sum)
}
