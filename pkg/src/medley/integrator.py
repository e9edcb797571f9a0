"""Plan execution and result integration.

The executor walks the plan tree depth first. Every response document
is translated against all of its source's mappings, not only the one
that motivated the call, and two bookkeeping structures let later
probes be skipped when their answer is already known:

* call coverage: a previous call on the same source covers a probe when
  its anchor is an ancestor of the probe's anchor and each of its pins,
  rebased under the probe anchor, appears among the probe's pins (the
  previous call returned a superset of what the probe would);
* materialized records: once a (source, class location, key) record has
  come back inside some response, the whole record subtree was
  translated, so any probe keyed on that record adds nothing.

Facts live in an InstanceGraph keyed by (class, key) with the key
spelling kept exactly as normalized from the document. reconcile()
folds case so that individuals of one class whose keys differ only in
case merge, with the lexicographically least spelling as
representative. filter_answers() then runs the query against the
reconciled graph; it is the place where the query semantics is decided,
everything before it only fetches enough facts.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass

from .cq import Constant, Variable
from .errors import ExecutionError, MedleyError, TransportError
from .ontology import PredicateKind
from .xsource.xpath import XPathExpr, common_prefix, eval_steps, is_prefix
from .xsource.xquery import XQueryExpr, normalize_value, render_xquery


def fold_key(value):
    return normalize_value(value).casefold()


@dataclass(frozen=True)
class Individual:
    class_name: str
    key: str


class InstanceGraph:
    """Individuals, their literal facts and object edges, each fact
    tagged with the sources asserting it."""

    def __init__(self):
        self.individuals = {}  # (class, key) -> set of spellings seen
        self.literals = {}  # (class, key) -> {prop: {value: set(source)}}
        self.edges = {}  # prop -> {(dom_id, rng_id): set(source)}

    def add_individual(self, class_name, key, spelling=None):
        ind = (class_name, key)
        self.individuals.setdefault(ind, set()).add(
            spelling if spelling is not None else key
        )
        return ind

    def add_literal(self, ind, prop, value, source):
        self.literals.setdefault(ind, {}).setdefault(prop, {}).setdefault(
            value, set()
        ).add(source)

    def add_edge(self, prop, dom, rng, source):
        self.edges.setdefault(prop, {}).setdefault((dom, rng), set()).add(source)

    def representative(self, ind):
        return min(self.individuals[ind])

    def literal_values(self, ind, prop):
        return self.literals.get(ind, {}).get(prop, {})

    def individual_list(self):
        return [
            Individual(c, self.representative((c, k)))
            for c, k in sorted(self.individuals)
        ]

    def edge_list(self):
        out = []
        for prop in sorted(self.edges):
            for (dom, rng), sources in sorted(self.edges[prop].items()):
                out.append((prop, dom, rng, sources))
        return out

    def size(self):
        n_lit = sum(len(vals) for props in self.literals.values() for vals in props.values())
        n_edge = sum(len(pairs) for pairs in self.edges.values())
        return len(self.individuals), n_lit, n_edge


def reconcile(graph):
    """Merge individuals of one class whose keys differ only by case.

    Rebuilding into a fresh graph keyed by folded keys makes the
    operation idempotent and independent of insertion order; the
    representative spelling is recovered as the minimum over the merged
    spelling sets.
    """
    out = InstanceGraph()
    remap = {}
    for (cls, key), spellings in graph.individuals.items():
        folded = (cls, fold_key(key))
        remap[(cls, key)] = folded
        for sp in spellings:
            out.add_individual(cls, folded[1], sp)
    for ind, props in graph.literals.items():
        for prop, values in props.items():
            for value, sources in values.items():
                for src in sources:
                    out.add_literal(remap[ind], prop, value, src)
    for prop, pairs in graph.edges.items():
        for (dom, rng), sources in pairs.items():
            for src in sources:
                out.add_edge(prop, remap[dom], remap[rng], src)
    return out


# ------------------------------------------------------------- executor

@dataclass
class SourceCall:
    group_label: str
    source: str
    xquery: str
    items: int
    provenance: object


@dataclass
class ExecutionResult:
    graph: InstanceGraph  # raw, pre-reconciliation
    calls: list
    warnings: list
    provenance: dict  # source -> last ProvenanceRecord


def _pin_query(anchor, pins):
    expr = XQueryExpr(
        for_var="d",
        for_path=anchor,
        where=tuple((XPathExpr(False, steps), const) for steps, const in pins),
        return_path=None,
    )
    return render_xquery(expr)


class Executor:
    def __init__(self, directory, services, parallel=False, max_workers=4):
        self.directory = directory
        self.services = services
        self.parallel = parallel
        self.max_workers = max_workers
        self.graph = InstanceGraph()
        self.calls = []
        self.warnings = []
        self.provenance = {}
        self._coverage = []  # (source, anchor steps, frozenset of (steps, const))
        self._materialized = set()  # (source, location steps, folded key)
        self._fold_index = {}  # (class, folded key) -> set of raw ids

    # -------------------------------------------------------- plumbing

    def _covered(self, source, anchor, pins):
        pin_set = frozenset(pins)
        for src, prior_anchor, prior_pins in self._coverage:
            if src != source:
                continue
            if len(prior_anchor) > len(anchor.steps):
                continue
            if anchor.steps[: len(prior_anchor)] != prior_anchor:
                continue
            delta = anchor.steps[len(prior_anchor):]
            ok = True
            for psteps, pconst in prior_pins:
                if psteps[: len(delta)] != delta or (psteps[len(delta):], pconst) not in pin_set:
                    ok = False
                    break
            if ok:
                return True
        cm = self.directory.class_mapping_at(source, anchor)
        if cm is not None:
            key_steps = self.directory.key_path(source, cm.class_name).steps
            for steps, const in pins:
                if steps == key_steps:
                    if (source, anchor.steps, fold_key(const)) in self._materialized:
                        return True
        return False

    def _probe(self, group, source, anchor, pins):
        """Issue one call unless covered; translate whatever comes back."""
        if self._covered(source, anchor, pins):
            return
        xq = self._call(source, anchor, pins, group)
        return xq

    def _call(self, source, anchor, pins, group):
        service = self.services.get(source)
        if service is None:
            raise ExecutionError("no service available for source %r" % source)
        xq = _pin_query(anchor, pins)
        try:
            doc, prov = service.query(xq)
        except TransportError:
            raise
        except MedleyError as exc:
            raise ExecutionError("source %r failed: %s" % (source, exc))
        items = doc.child_elements()
        self._translate(source, anchor, items)
        self._coverage.append((source, anchor.steps, frozenset(pins)))
        self.calls.append(SourceCall(group.label, source, xq, len(items), prov))
        self.provenance[source] = prov
        return xq

    def _probe_batch(self, group, source, anchor, pin_lists):
        """Per-key probes of one arc and source. With parallel execution
        the uncovered calls go out together and their responses are
        folded back in request order, so the ledger stays deterministic."""
        todo = []
        for pins in pin_lists:
            if not self._covered(source, anchor, pins):
                todo.append(pins)
        if not todo:
            return
        if not self.parallel or len(todo) == 1:
            for pins in todo:
                self._call(source, anchor, pins, group)
            return
        service = self.services.get(source)
        if service is None:
            raise ExecutionError("no service available for source %r" % source)
        queries = [_pin_query(anchor, pins) for pins in todo]
        with concurrent.futures.ThreadPoolExecutor(self.max_workers) as pool:
            futures = [pool.submit(service.query, xq) for xq in queries]
            results = []
            for fut in futures:
                try:
                    results.append(fut.result())
                except TransportError:
                    raise
                except MedleyError as exc:
                    raise ExecutionError("source %r failed: %s" % (source, exc))
        for pins, xq, (doc, prov) in zip(todo, queries, results):
            items = doc.child_elements()
            self._translate(source, anchor, items)
            self._coverage.append((source, anchor.steps, frozenset(pins)))
            self.calls.append(SourceCall(group.label, source, xq, len(items), prov))
            self.provenance[source] = prov

    # ------------------------------------------------------ translation

    def _element_key(self, source, cm, el):
        key_path = self.directory.key_path(source, cm.class_name)
        nodes = eval_steps([el], key_path.steps)
        if not nodes:
            self.warnings.append(
                "source %s: a %s record at %s has no key at %s; skipped"
                % (source, cm.class_name, cm.location.render(), key_path.render())
            )
            return None
        raw = normalize_value(nodes[0].string_value())
        if not raw:
            self.warnings.append(
                "source %s: a %s record at %s has an empty key; skipped"
                % (source, cm.class_name, cm.location.render())
            )
            return None
        return raw

    def _register(self, source, cm, el):
        key = self._element_key(source, cm, el)
        if key is None:
            return None
        ind = self.graph.add_individual(cm.class_name, key)
        self._fold_index.setdefault((cm.class_name, fold_key(key)), set()).add(ind)
        self._materialized.add((source, cm.location.steps, fold_key(key)))
        return ind

    def _translate(self, source, anchor, items):
        """Extract facts from response items (copies of anchor elements)
        using every mapping of the source that lies under the anchor."""
        dirn = self.directory
        cms = [
            m
            for m in dirn.class_mappings
            if m.source == source and is_prefix(anchor, m.location)
        ]
        dms = [
            m
            for m in dirn.datatype_mappings
            if m.source == source and is_prefix(anchor, m.domain_location)
        ]
        oms = []
        for m in dirn.object_mappings:
            if m.source != source:
                continue
            rec = common_prefix(m.domain_location, m.range_location)
            if is_prefix(anchor, rec):
                oms.append((m, rec))

        cm_at = {m.location.steps: m for m in cms}
        for item in items:
            for cm in cms:
                rel = cm.location.steps[len(anchor.steps):]
                for el in eval_steps([item], rel):
                    self._register(source, cm, el)
            for dm in dms:
                cm = cm_at[dm.domain_location.steps]
                rel = dm.domain_location.steps[len(anchor.steps):]
                for el in eval_steps([item], rel):
                    key = self._element_key(source, cm, el)
                    if key is None:
                        continue
                    ind = (cm.class_name, key)
                    for vnode in eval_steps([el], dm.value_location.steps):
                        self.graph.add_literal(
                            ind,
                            dm.property_name,
                            normalize_value(vnode.string_value()),
                            source,
                        )
            for om, rec_loc in oms:
                dom_cm = cm_at[om.domain_location.steps]
                rng_cm = cm_at[om.range_location.steps]
                rec_rel = rec_loc.steps[len(anchor.steps):]
                dom_rel = om.domain_location.steps[len(rec_loc.steps):]
                rng_rel = om.range_location.steps[len(rec_loc.steps):]
                for rec in eval_steps([item], rec_rel):
                    dom_els = eval_steps([rec], dom_rel)
                    rng_els = eval_steps([rec], rng_rel)
                    for dom_el in dom_els:
                        dkey = self._element_key(source, dom_cm, dom_el)
                        if dkey is None:
                            continue
                        for rng_el in rng_els:
                            rkey = self._element_key(source, rng_cm, rng_el)
                            if rkey is None:
                                continue
                            self.graph.add_edge(
                                om.property_name,
                                (dom_cm.class_name, dkey),
                                (rng_cm.class_name, rkey),
                                source,
                            )

    # ---------------------------------------------------- fact queries

    def _spellings(self, ind):
        cls, key = ind
        folded = (cls, fold_key(key))
        return sorted(
            sp
            for raw in self._fold_index.get(folded, {ind})
            for sp in self.graph.individuals.get(raw, {raw[1]})
        )

    def _fact_values(self, ind, prop):
        """Literal values for an individual, unioned across case-folded
        key variants so executor pruning never outruns reconciliation."""
        cls, key = ind
        values = set()
        for raw in self._fold_index.get((cls, fold_key(key)), {ind}):
            values.update(self.graph.literal_values(raw, prop))
        return values

    def _has_datatype(self, ind, check):
        values = self._fact_values(ind, check.atom.predicate)
        if check.constant is None:
            return bool(values)
        return normalize_value(check.constant) in values

    def _passes_local(self, ind, node):
        ontology = self.directory.ontology
        for ca in node.class_atoms:
            if not ontology.is_subclass(ind[0], ca.predicate):
                return False
        for dc in node.datatype_checks:
            if dc.constant is not None and not self._has_datatype(ind, dc):
                return False
        return True

    def _edge_targets(self, arc, ind):
        folded = (ind[0], fold_key(ind[1]))
        out = []
        for (dom, rng) in self.graph.edges.get(arc.atom.predicate, {}):
            if (dom[0], fold_key(dom[1])) == folded:
                out.append(rng)
        return sorted(out)

    def _arc_satisfied(self, ind, arc):
        targets = self._edge_targets(arc, ind)
        if arc.constant is not None:
            want = fold_key(arc.constant)
            return any(fold_key(r[1]) == want for r in targets)
        return any(self._passes_local(r, arc.target) for r in targets)

    # -------------------------------------------------------- the walk

    def run(self, plan):
        root = plan.root
        group = root.group
        for gm in group.mappings:
            cm, dm = gm.class_mapping, gm.property_mapping
            pins = [(dm.value_location.steps, group.constant)]
            self._probe(group, gm.source, cm.location, pins)
        ontology = self.directory.ontology
        class_atom, data_atom = group.atoms
        want = normalize_value(group.constant)
        roots = sorted(
            ind
            for ind in self.graph.individuals
            if ontology.is_subclass(ind[0], class_atom.predicate)
            and want in self._fact_values(ind, data_atom.predicate)
        )
        self._execute_node(root, roots)
        return ExecutionResult(self.graph, self.calls, self.warnings, self.provenance)

    def _merged_pins(self, om, rec_loc, target):
        """Constant filters of the target node that this source can
        evaluate in the same call, rebased under the record anchor."""
        pins = []
        if target is None:
            return pins
        for dc in target.datatype_checks:
            if dc.constant is None:
                continue
            for g in dc.groups:
                hit = None
                for gm in g.mappings:
                    pm = gm.property_mapping
                    if gm.source == om.source and pm.domain_location.steps == om.range_location.steps:
                        hit = pm
                        break
                if hit is not None:
                    rel = om.range_location.steps[len(rec_loc.steps):]
                    pins.append((rel + hit.value_location.steps, dc.constant))
                    break
        return pins

    def _run_arc(self, node, arc, surviving):
        for gm in arc.group.mappings:
            om = gm.property_mapping
            rec_loc = common_prefix(om.domain_location, om.range_location)
            dom_cm = self.directory.class_mapping_at(om.source, om.domain_location)
            key_path = self.directory.key_path(om.source, dom_cm.class_name)
            key_rel = om.domain_location.steps[len(rec_loc.steps):] + key_path.steps
            extra = self._merged_pins(om, rec_loc, arc.target)
            pin_lists = []
            for ind in surviving:
                if ind[0] != dom_cm.class_name:
                    continue
                for spelling in self._spellings(ind):
                    pin_lists.append([(key_rel, spelling)] + extra)
            if pin_lists:
                self._probe_batch(arc.group, om.source, rec_loc, pin_lists)

    def _execute_node(self, node, individuals):
        surviving = sorted(set(individuals))
        executed = []
        i = 0
        arcs = node.arcs
        while i < len(arcs):
            wave = [arcs[i]]
            i += 1
            while i < len(arcs) and arcs[i].parallel_ok:
                wave.append(arcs[i])
                i += 1
            for arc in wave:
                self._run_arc(node, arc, surviving)
                if arc.target is not None:
                    targets = set()
                    for ind in surviving:
                        targets.update(self._edge_targets(arc, ind))
                    self._execute_node(arc.target, sorted(targets))
            executed.extend(wave)
            surviving = [
                ind
                for ind in surviving
                if all(self._arc_satisfied(ind, a) for a in executed)
            ]
        for dc in node.datatype_checks:
            for ind in surviving:
                if self._has_datatype(ind, dc):
                    continue
                self._probe_datatype(dc, ind)
            surviving = [ind for ind in surviving if self._has_datatype(ind, dc)]
        return surviving

    def _probe_datatype(self, check, ind):
        for g in check.groups:
            for gm in g.mappings:
                cm, dm = gm.class_mapping, gm.property_mapping
                if cm.class_name != ind[0]:
                    continue
                key_path = self.directory.key_path(gm.source, cm.class_name)
                for spelling in self._spellings(ind):
                    self._probe(g, gm.source, cm.location, [(key_path.steps, spelling)])


def execute_plan(plan, services, parallel=False, max_workers=4):
    executor = Executor(plan.directory, services, parallel, max_workers)
    return executor.run(plan)


# -------------------------------------------------------------- answers

@dataclass
class AnswerSet:
    answer_vars: tuple
    rows: list
    graph: InstanceGraph
    match_count: int = 0


def _order_atoms(query):
    """Constant-bearing atoms first, then grow along shared variables."""
    remaining = list(query.atoms)
    ordered = []
    bound = set()

    def score(atom):
        consts = sum(1 for a in atom.args if isinstance(a, Constant))
        shared = sum(
            1 for a in atom.args if isinstance(a, Variable) and a.name in bound
        )
        return (shared + consts, consts)

    while remaining:
        best = max(remaining, key=score)
        remaining.remove(best)
        ordered.append(best)
        bound.update(a.name for a in best.args if isinstance(a, Variable))
    return ordered


def filter_answers(query, graph, ontology):
    """Evaluate the query exactly against the reconciled graph.

    Returns sorted distinct answer rows plus the slice of the graph the
    satisfying assignments touch; retained individuals keep all their
    literals so the result is self-describing.
    """
    atoms = _order_atoms(query)

    kinds = {}
    for atom in atoms:
        kind, canon, _ = ontology.resolve_predicate(atom.predicate)
        kinds[atom] = kind

    used_inds = set()
    used_edges = set()
    rows = set()
    match_count = 0

    def individuals_of(class_name):
        return [
            ind for ind in graph.individuals if ontology.is_subclass(ind[0], class_name)
        ]

    def solve(i, binding, touched_inds, touched_edges):
        nonlocal match_count
        if i == len(atoms):
            match_count += 1
            row = []
            for var in query.answer_vars:
                val = binding[var]
                row.append(graph.representative(val) if isinstance(val, tuple) else val)
            rows.add(tuple(row))
            used_inds.update(touched_inds)
            used_edges.update(touched_edges)
            return
        atom = atoms[i]
        kind = kinds[atom]
        if kind is PredicateKind.CLASS:
            var = atom.args[0].name
            if var in binding:
                val = binding[var]
                if isinstance(val, tuple) and ontology.is_subclass(val[0], atom.predicate):
                    solve(i + 1, binding, touched_inds, touched_edges)
                return
            for ind in individuals_of(atom.predicate):
                binding[var] = ind
                solve(i + 1, binding, touched_inds | {ind}, touched_edges)
                del binding[var]
            return
        if kind is PredicateKind.DATATYPE:
            subj, obj = atom.args
            subj_candidates = (
                [binding[subj.name]]
                if subj.name in binding
                else list(graph.individuals)
            )
            for ind in subj_candidates:
                if not isinstance(ind, tuple):
                    continue
                values = graph.literal_values(ind, atom.predicate)
                if isinstance(obj, Constant):
                    if normalize_value(obj.value) not in values:
                        continue
                    if subj.name in binding:
                        solve(i + 1, binding, touched_inds, touched_edges)
                    else:
                        binding[subj.name] = ind
                        solve(i + 1, binding, touched_inds | {ind}, touched_edges)
                        del binding[subj.name]
                    continue
                for value in values:
                    if obj.name in binding:
                        if binding[obj.name] != value:
                            continue
                        extra = {}
                    else:
                        extra = {obj.name: value}
                    had_subj = subj.name in binding
                    binding.update(extra)
                    if not had_subj:
                        binding[subj.name] = ind
                    solve(
                        i + 1,
                        binding,
                        touched_inds if had_subj else touched_inds | {ind},
                        touched_edges,
                    )
                    if not had_subj:
                        del binding[subj.name]
                    for k in extra:
                        del binding[k]
            return
        # object property
        subj, obj = atom.args
        pairs = graph.edges.get(atom.predicate, {})
        for (dom, rng), _sources in pairs.items():
            if subj.name in binding and binding[subj.name] != dom:
                continue
            if isinstance(obj, Constant):
                if rng[1] != fold_key(obj.value):
                    continue
            elif obj.name in binding and binding[obj.name] != rng:
                continue
            added = []
            if subj.name not in binding:
                binding[subj.name] = dom
                added.append(subj.name)
            if isinstance(obj, Variable) and obj.name not in binding:
                binding[obj.name] = rng
                added.append(obj.name)
            solve(
                i + 1,
                binding,
                touched_inds | {dom, rng},
                touched_edges | {(atom.predicate, dom, rng)},
            )
            for name in added:
                del binding[name]

    solve(0, {}, frozenset(), frozenset())

    slice_graph = InstanceGraph()
    for ind in used_inds:
        cls, key = ind
        for sp in graph.individuals[ind]:
            slice_graph.add_individual(cls, key, sp)
        for prop, values in graph.literals.get(ind, {}).items():
            for value, sources in values.items():
                for src in sources:
                    slice_graph.add_literal(ind, prop, value, src)
    for prop, dom, rng in used_edges:
        for src in graph.edges[prop][(dom, rng)]:
            slice_graph.add_edge(prop, dom, rng, src)

    return AnswerSet(
        answer_vars=query.answer_vars,
        rows=sorted(rows),
        graph=slice_graph,
        match_count=match_count,
    )
