"""Query decomposition: groups, root selection, plan tree, arc ordering.

A group is a fragment of the query some source can answer in one call:
a class atom, an object-property atom, or a class atom paired with a
property atom on the same subject variable (a composite). Groups are
formed first; a constant-bearing class+datatype composite is then chosen
as the root by checking that a directed walk from it (domain to range
along object atoms) reaches the whole query; the plan tree mirrors that
walk. Arcs under each node are reordered so branches that carry
constants somewhere below run before branches that do not, since their
results shrink the key sets the later branches are probed with.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .cq import Atom, Constant, Variable
from .errors import PlanError
from .xsource.xpath import common_prefix, relative_steps


class GroupKind(enum.Enum):
    CLASS = "class"
    OBJECT = "object-property"
    DATA_COMPOSITE = "class+datatype"
    OBJECT_COMPOSITE = "class+object"


@dataclass(frozen=True)
class GroupMapping:
    source: str
    class_mapping: object = None
    property_mapping: object = None


@dataclass(frozen=True)
class Group:
    kind: GroupKind
    atoms: tuple
    variable: str
    value_var: str | None
    constant: str | None
    mappings: tuple
    label: str = field(default="", compare=False)

    def sources(self):
        seen = []
        for gm in self.mappings:
            if gm.source not in seen:
                seen.append(gm.source)
        return seen

    def describe(self):
        return " + ".join(str(a) for a in self.atoms)


@dataclass
class DatatypeCheck:
    atom: Atom
    groups: tuple  # composite groups able to evaluate it
    constant: str | None  # None: existence of some value is enough


@dataclass
class PlanArc:
    atom: Atom
    group: Group
    target: PlanNode | None  # None when the range is a constant
    constant: str | None
    parallel_ok: bool = True
    constant_distance: int | None = None


@dataclass
class PlanNode:
    variable: str
    group: Group | None  # what fetches this node's individuals
    class_atoms: tuple
    type_check_groups: tuple
    datatype_checks: tuple
    arcs: list
    chosen_source: str | None = None
    template: str | None = None


@dataclass
class RootSelection:
    root: Group
    rejected: tuple  # (group, reason) for candidates that failed


@dataclass
class PlanTree:
    root: PlanNode
    groups: tuple
    selection: RootSelection
    query: object
    directory: object

    def nodes(self):
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            out.append(node)
            for arc in reversed(node.arcs):
                if arc.target is not None:
                    stack.append(arc.target)
        return out

    def by_var(self, variable):
        for node in self.nodes():
            if node.variable == variable:
                return node
        return None

    def placed_groups(self):
        placed = []

        def add(group):
            if group is not None and group not in placed:
                placed.append(group)

        for node in self.nodes():
            add(node.group)
            for g in node.type_check_groups:
                add(g)
            for dc in node.datatype_checks:
                for g in dc.groups:
                    add(g)
            for arc in node.arcs:
                add(arc.group)
        return placed

    def subsumed_groups(self):
        placed = set(id(g) for g in self.placed_groups())
        return [g for g in self.groups if id(g) not in placed]


# ------------------------------------------------------------ formation

def form_groups(query, directory):
    """Build the group table. Raises PlanError when some atom has no
    supporting source at all, since the query would be unanswerable."""
    class_atoms_by_var = {}
    for atom in query.atoms:
        if len(atom.args) == 1:
            class_atoms_by_var.setdefault(atom.args[0].name, []).append(atom)

    ontology = directory.ontology
    is_object = lambda a: a.predicate in ontology.object_props
    is_datatype = lambda a: a.predicate in ontology.datatype_props

    composites = []
    object_groups = []
    class_groups = []
    covered_datatype = set()

    seen_vars = []
    for atom in query.atoms:
        if len(atom.args) == 1 and atom.args[0].name not in seen_vars:
            seen_vars.append(atom.args[0].name)

    for var in seen_vars:
        for class_atom in class_atoms_by_var[var]:
            for atom in query.atoms:
                if len(atom.args) != 2 or atom.args[0].name != var:
                    continue
                second = atom.args[1]
                value_var = second.name if isinstance(second, Variable) else None
                constant = second.value if isinstance(second, Constant) else None
                if is_datatype(atom):
                    pairs = directory.composite_datatype_pairs(
                        class_atom.predicate, atom.predicate
                    )
                    kind = GroupKind.DATA_COMPOSITE
                else:
                    pairs = directory.composite_object_pairs(
                        class_atom.predicate, atom.predicate
                    )
                    kind = GroupKind.OBJECT_COMPOSITE
                if not pairs:
                    continue
                if is_datatype(atom):
                    covered_datatype.add(atom)
                composites.append(
                    Group(
                        kind,
                        (class_atom, atom),
                        var,
                        value_var,
                        constant,
                        tuple(GroupMapping(cm.source, cm, pm) for cm, pm in pairs),
                    )
                )

    for atom in query.atoms:
        if len(atom.args) == 2 and is_object(atom):
            oms = directory.lookup_object(atom.predicate)
            if not oms:
                raise PlanError(
                    "no registered source stores property %s" % atom.predicate
                )
            object_groups.append(
                Group(
                    GroupKind.OBJECT,
                    (atom,),
                    atom.args[0].name,
                    atom.args[1].name if isinstance(atom.args[1], Variable) else None,
                    None,
                    tuple(GroupMapping(om.source, None, om) for om in oms),
                )
            )

    for atom in query.atoms:
        if len(atom.args) == 1:
            cms = directory.lookup_class(atom.predicate)
            if not cms:
                raise PlanError(
                    "no registered source stores class %s" % atom.predicate
                )
            class_groups.append(
                Group(
                    GroupKind.CLASS,
                    (atom,),
                    atom.args[0].name,
                    None,
                    None,
                    tuple(GroupMapping(cm.source, cm, None) for cm in cms),
                )
            )

    for atom in query.atoms:
        if len(atom.args) == 2 and is_datatype(atom):
            var = atom.args[0].name
            if var not in class_atoms_by_var:
                raise PlanError(
                    "datatype atom %s needs a class atom on %s to be answerable"
                    % (atom, var)
                )
            if atom not in covered_datatype:
                raise PlanError(
                    "no source stores %s together with a class of %s" % (atom, var)
                )

    groups = composites + object_groups + class_groups
    labeled = []
    for i, g in enumerate(groups, start=1):
        labeled.append(
            Group(g.kind, g.atoms, g.variable, g.value_var, g.constant, g.mappings,
                  label="G%d" % i)
        )
    return labeled


# -------------------------------------------------------- root selection

def _directed_absorption(candidate, query):
    """Walk the query from the candidate along atom directions; return
    the atoms a directed evaluation starting there can never reach."""
    absorbed_vars = {candidate.variable}
    remaining = {i: a for i, a in enumerate(query.atoms)}
    for i, a in list(remaining.items()):
        if a in candidate.atoms:
            del remaining[i]
    changed = True
    while changed:
        changed = False
        for i, atom in list(remaining.items()):
            subject = atom.args[0].name
            if subject not in absorbed_vars:
                continue
            del remaining[i]
            changed = True
            if len(atom.args) == 2 and isinstance(atom.args[1], Variable):
                absorbed_vars.add(atom.args[1].name)
    return [remaining[i] for i in sorted(remaining)]


def select_root(query, groups):
    candidates = [
        g for g in groups if g.kind is GroupKind.DATA_COMPOSITE and g.constant is not None
    ]
    if not candidates:
        raise PlanError(
            "no class+datatype group carries a constant; nothing anchors the plan"
        )
    rejected = []
    root = None
    for cand in candidates:
        left = _directed_absorption(cand, query)
        if not left:
            if root is None:
                root = cand
            continue
        # every failing candidate is recorded, even after a winner is
        # found, so the explanation can say why the others lost
        rejected.append(
            (
                cand,
                "cannot reach %s by forward traversal"
                % ", ".join(str(a) for a in left),
            )
        )
    if root is None:
        raise PlanError(
            "no instantiated group can reach the whole query; "
            + "; ".join("%s: %s" % (g.label, why) for g, why in rejected)
        )
    return RootSelection(root, tuple(rejected))


# ------------------------------------------------------------- building

def _quote(value):
    return '"%s"' % value.replace('"', '""')


def instantiate_node(node, directory, arc=None):
    """Pick the template source for a node and render its probe shape.

    The root renders a complete query; arc targets render with a {key}
    placeholder filled per domain individual at execution time.
    """
    if node.group is None:
        return
    gm = node.group.mappings[0]
    node.chosen_source = gm.source
    if arc is None:
        cm, dm = gm.class_mapping, gm.property_mapping
        where = ""
        if node.group.constant is not None:
            where = " where $d/%s eq %s" % (
                dm.value_location.render(),
                _quote(node.group.constant),
            )
        node.template = "for $d in %s%s return $d" % (cm.location.render(), where)
    else:
        om = gm.property_mapping
        anchor = common_prefix(om.domain_location, om.range_location)
        domain_cm = directory.class_mapping_at(om.source, om.domain_location)
        key = directory.key_path(om.source, domain_cm.class_name)
        rel = relative_steps(anchor, om.domain_location) + key.steps
        node.template = 'for $d in %s where $d/%s eq "{key}" return $d' % (
            anchor.render(),
            "/".join(rel),
        )


def instantiate_template(template, key_value):
    return template.replace("{key}", key_value.replace('"', '""'))


def build_plan(query, groups, selection, directory):
    root_group = selection.root
    class_atoms_by_var = {}
    for atom in query.atoms:
        if len(atom.args) == 1:
            class_atoms_by_var.setdefault(atom.args[0].name, []).append(atom)

    class_group_by_atom = {g.atoms[0]: g for g in groups if g.kind is GroupKind.CLASS}
    object_group_by_atom = {g.atoms[0]: g for g in groups if g.kind is GroupKind.OBJECT}
    composite_by_atoms = {
        g.atoms: g
        for g in groups
        if g.kind in (GroupKind.DATA_COMPOSITE, GroupKind.OBJECT_COMPOSITE)
    }

    ontology = directory.ontology
    covered = set()
    visited = set()

    def datatype_checks_for(var, skip_atom):
        checks = []
        for atom in query.atoms:
            if (
                len(atom.args) == 2
                and atom.predicate in ontology.datatype_props
                and atom.args[0].name == var
                and atom != skip_atom
            ):
                comp_groups = tuple(
                    composite_by_atoms[(ca, atom)]
                    for ca in class_atoms_by_var.get(var, [])
                    if (ca, atom) in composite_by_atoms
                )
                # form_groups already guaranteed at least one composite
                checks.append(
                    DatatypeCheck(
                        atom,
                        comp_groups,
                        atom.args[1].value
                        if isinstance(atom.args[1], Constant)
                        else None,
                    )
                )
                covered.add(atom)
        return tuple(checks)

    def make_node(var, fetch_group, covered_class_atom, skip_datatype_atom):
        if var in visited:
            raise PlanError(
                "variable %s is reached along two branches; only tree-shaped "
                "queries are supported" % var
            )
        visited.add(var)
        class_atoms = tuple(class_atoms_by_var.get(var, []))
        type_checks = []
        for ca in class_atoms:
            covered.add(ca)
            if ca != covered_class_atom:
                type_checks.append(class_group_by_atom[ca])
        node = PlanNode(
            variable=var,
            group=fetch_group,
            class_atoms=class_atoms,
            type_check_groups=tuple(type_checks),
            datatype_checks=datatype_checks_for(var, skip_datatype_atom),
            arcs=[],
        )
        for atom in query.atoms:
            if (
                len(atom.args) != 2
                or atom.predicate not in ontology.object_props
                or atom.args[0].name != var
            ):
                continue
            covered.add(atom)
            group = object_group_by_atom[atom]
            second = atom.args[1]
            if isinstance(second, Constant):
                node.arcs.append(PlanArc(atom, group, None, second.value))
                continue
            child = make_node(second.name, group, None, None)
            arc = PlanArc(atom, group, child, None)
            node.arcs.append(arc)
            instantiate_node(child, directory, arc)
        return node

    root_class_atom, root_data_atom = root_group.atoms
    covered.add(root_data_atom)
    root = make_node(root_group.variable, root_group, root_class_atom, root_data_atom)
    instantiate_node(root, directory)

    missing = [a for a in query.atoms if a not in covered]
    if missing:
        raise PlanError(
            "plan cannot cover %s; the query shape is outside the supported "
            "fragment" % ", ".join(str(a) for a in missing)
        )
    return PlanTree(root, tuple(groups), selection, query, directory)


# ----------------------------------------------------------- optimizing

def _node_constant_distance(node):
    best = None
    if any(dc.constant is not None for dc in node.datatype_checks):
        best = 0
    for arc in node.arcs:
        if arc.constant is not None:
            d = 0
        elif arc.target is not None:
            sub = _node_constant_distance(arc.target)
            d = None if sub is None else sub + 1
        else:
            d = None
        if d is not None and (best is None or d < best):
            best = d
    return best


def optimize_plan(tree):
    """Stable-sort each node's arcs by ascending constant distance and
    mark the parallelism boundary: the first arc with no constant pruning
    below it must wait for the constant-bearing arcs, everything else may
    run alongside its neighbours."""

    def visit(node):
        for arc in node.arcs:
            if arc.constant is not None:
                arc.constant_distance = 0
            elif arc.target is not None:
                arc.constant_distance = _node_constant_distance(arc.target)
            else:
                arc.constant_distance = None
        node.arcs.sort(
            key=lambda a: (a.constant_distance is None, a.constant_distance or 0)
        )
        for i, arc in enumerate(node.arcs):
            prev = node.arcs[i - 1].constant_distance if i > 0 else None
            cur = arc.constant_distance
            arc.parallel_ok = not (i > 0 and prev == 0 and cur != 0)
        for arc in node.arcs:
            if arc.target is not None:
                visit(arc.target)

    visit(tree.root)
    return tree


def make_plan(query, directory):
    groups = form_groups(query, directory)
    selection = select_root(query, groups)
    tree = build_plan(query, groups, selection, directory)
    return optimize_plan(tree)


# ------------------------------------------------------------ rendering

def render_group_table(groups):
    rows = [("group", "kind", "covers", "sources")]
    for g in groups:
        rows.append((g.label, g.kind.value, g.describe(), ", ".join(g.sources())))
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    lines = []
    for idx, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
        if idx == 0:
            lines.append("  ".join("-" * widths[i] for i in range(4)))
    return "\n".join(lines)


def render_plan(tree):
    out = []
    sel = tree.selection
    out.append("root group: %s (%s)" % (sel.root.label, sel.root.describe()))
    for group, why in sel.rejected:
        out.append("rejected root candidate %s: %s" % (group.label, why))

    def visit(node, depth, prefix):
        pad = "  " * depth
        head = "%s%s%s" % (pad, prefix, node.variable)
        if node.group is not None:
            head += ": %s via %s [%s]" % (
                node.group.label,
                node.chosen_source,
                ", ".join(node.group.sources()),
            )
        out.append(head)
        if node.template:
            out.append("%s  template: %s" % (pad, node.template))
        for g in node.type_check_groups:
            out.append(
                "%s  type check %s: %s [%s]"
                % (pad, g.label, g.describe(), ", ".join(g.sources()))
            )
        for dc in node.datatype_checks:
            kind = "filter" if dc.constant is not None else "require"
            via = ", ".join(g.label for g in dc.groups)
            out.append("%s  %s %s via %s" % (pad, kind, dc.atom, via))
        for arc in node.arcs:
            dist = "-" if arc.constant_distance is None else str(arc.constant_distance)
            par = "parallel ok" if arc.parallel_ok else "sequential"
            if arc.target is None:
                out.append(
                    "%s  arc %s (%s): key filter %s, distance %s, %s"
                    % (pad, arc.atom, arc.group.label, _quote(arc.constant), dist, par)
                )
            else:
                out.append(
                    "%s  arc %s (%s): distance %s, %s"
                    % (pad, arc.atom, arc.group.label, dist, par)
                )
                visit(arc.target, depth + 1, "node ")

    visit(tree.root, 0, "node ")
    subsumed = tree.subsumed_groups()
    if subsumed:
        out.append(
            "subsumed groups: "
            + ", ".join("%s (%s)" % (g.label, g.describe()) for g in subsumed)
        )
    return "\n".join(out)
