"""Cascaded query matching, and how category restriction rescues short queries.

Short event queries carry very little text, so pure phrase similarity can
latch onto the wrong word sense: "wedding shower" pulls in "take a shower".
Restricting the candidate pool to human-chosen top-level categories removes
whole branches of decoys before similarity ever runs.

Run:  python demos/02_query_matching.py
"""

from videx import MatchQuery, OverlapCosineBackend, load_sample_ontology, match_concepts, match_events

tree = load_sample_ontology()
backend = OverlapCosineBackend.from_tree(tree)


def show(title, query):
    print(f"\n-- {title}")
    try:
        for eid, score in match_events(tree, query, backend)[:3]:
            print(f"   {score:.4f}  {tree.node(eid).name}")
    except Exception as exc:
        print(f"   error: {exc}")


print("== query: 'wedding shower' ==")
show("unrestricted (decoy sneaks in)", MatchQuery("wedding shower"))
show("restricted to 'family life'",
     MatchQuery("wedding shower", restrict_categories=frozenset({"c01"})))

print("\n== query: 'landing a fish' ==")
show("unrestricted (wrong senses of 'landing' and 'fish')", MatchQuery("landing a fish"))
show("restricted to 'sports and fitness' + 'hobbies and crafts'",
     MatchQuery("landing a fish", restrict_categories=frozenset({"c02", "c03"})))
print("   note: with zero word overlap the restricted ranking falls back to")
print("   deterministic id order; an embedding backend would separate these.")

print("\n== query: 'working on a woodworking project' ==")
show("unrestricted", MatchQuery("working on a woodworking project"))
show("restricted to 'hobbies and crafts'",
     MatchQuery("working on a woodworking project", restrict_categories=frozenset({"c03"})))
print("   note: restriction recovers the right branch; within it, 'make a")
print("   crochet project' outranks 'make wood projects' on the shared token")
print("   'project' because the default backend does no stemming.")

print("\n== full cascade: events then concepts ==")
result = match_concepts(
    tree, MatchQuery("wedding shower", restrict_categories=frozenset({"c01"}),
                     event_count=2, concept_count=6), backend
)
print("matched events: ", [tree.node(e).name for e, _ in result.matched_events])
print("matched concepts:", [tree.node(c).name for c, _ in result.matched_concepts])
print("shortage flag:   ", result.shortage)
