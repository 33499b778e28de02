"""Tour of the bundled sample ontology.

Loads the category/event/concept tree that ships with the package, prints
its statistics, walks a branch, and shows which events are candidates for
redundancy analysis (events on different branches than a query event).

Run:  python demos/01_ontology_tour.py
"""

from videx import load_sample_ontology

tree = load_sample_ontology()
stats = tree.stats()

print("== sample ontology ==")
print(f"categories={stats.category_count}  events={stats.event_count}  "
      f"concepts={stats.concept_count}  max_depth={stats.max_depth}")
print(f"avg children per category: {stats.avg_children_per_category:.2f}")

print("\n== events per top-level category ==")
for cid, count in sorted(stats.events_per_top_category.items()):
    print(f"  {tree.node(cid).name:<28} {count}")

print("\n== walking the 'pets and animals' branch ==")


def walk(node_id, indent=0):
    node = tree.node(node_id)
    print("  " * indent + f"[{node.kind[0]}] {node.name} ({node.id})")
    for child in tree.children(node_id):
        walk(child, indent + 1)


walk("c06")

print("\n== events under selected categories ==")
for cids in (["c01"], ["c02", "c03"]):
    names = sorted(tree.node(e).name for e in tree.events_under(cids))
    label = " + ".join(tree.node(c).name for c in cids)
    print(f"  under {label}: {names}")

print("\n== redundancy candidates ==")
print("Events sharing a branch with the query are excluded: parent/child")
print("category relations like 'groom a dog' vs 'feed a dog' are a feature")
print("of the hierarchy, not redundancy.")
for eid in ("e11", "e01"):
    candidates = sorted(tree.node(e).name for e in tree.redundancy_candidates(eid))
    print(f"  {tree.node(eid).name!r}: {len(candidates)} candidates, e.g. {candidates[:3]}")
