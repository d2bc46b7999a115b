#!/usr/bin/env python3
"""Regenerate the bundled demo fixtures: benchmarks, mock scripts, and configs.

Single source of truth for the scripted demo behaviour. Every mock rule is
checked for collisions against the other bundled texts before anything is
written, and the artifact-search cases are verified against the real store so
the scripted tool plans stay honest.

Run from the repo root:  python scripts/gen_demo_fixtures.py
"""

from __future__ import annotations

import json
import re
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
DATA = REPO / "src" / "cba" / "data"

sys.path.insert(0, str(REPO / "src"))

from cba.artifacts import ArtifactStore, get_artifact, search_artifacts  # noqa: E402

GENERIC_ANSWER = (
    "I do not have enough grounded context to answer that precisely. "
    "Please consult the knowledge base or name a specific artifact."
)
AGENT_GENERIC = (
    "THOUGHT: No artifact lookup applies to this question.\n"
    "FINAL: This looks like a general knowledge question; the artifact tools "
    "cannot ground an answer for it."
)
SPECIALIST_ANSWER = (
    "Specialist guidance: the applicable rules depend on the data category and "
    "jurisdiction involved; the relevant policy register has the binding text."
)

# (case_id, question, rule phrase from the question, keywords, reference, scripted answer)
KNOWLEDGE_CASES = [
    ("ck-01", "What is the default retention period for operational logs?",
     "default retention period for operational logs", ["90 days"],
     "Operational logs are kept for 90 days by default and purged automatically afterwards.",
     "Operational logs are retained for 90 days by default and purged automatically when the window closes (see data_retention.md#0)."),
    ("ck-02", "What happens to user content after an account is deleted?",
     "user content after an account is deleted", ["30 days", "backup"],
     "Content leaves serving systems within 30 days and backup copies expire on the rotation schedule within a further 60 days.",
     "After account deletion, user content is removed from serving systems within 30 days, and backup snapshots age out on the rotation schedule within a further 60 days (see data_retention.md#0)."),
    ("ck-03", "Who is accountable for a dataset across its lifecycle?",
     "accountable for a dataset across its lifecycle", ["data owner"],
     "The single data owner is accountable for the dataset's purpose, retention, access, and decommissioning.",
     "Each dataset has exactly one data owner who is accountable for its full lifecycle: purpose, retention, access, and decommissioning (see data_ownership.md#0)."),
    ("ck-04", "What does a data steward do compared to the data owner?",
     "data steward do compared", ["day-to-day", "accountable"],
     "The steward handles day-to-day duties like documentation and access triage, while the owner stays accountable.",
     "A data steward handles the day-to-day work, schema documentation, access triage, and quality dashboards, while the data owner remains accountable for the dataset (see data_ownership.md#0)."),
    ("ck-05", "What lawful bases does the GDPR provide for processing?",
     "lawful bases does the GDPR", ["consent", "legitimate interest"],
     "Six bases: consent, contract, legal obligation, vital interests, public task, and legitimate interest.",
     "The GDPR provides six lawful bases: consent, contract performance, legal obligation, vital interests, public task, and legitimate interest, the last requiring a documented balancing test (see gdpr_overview.md#0)."),
    ("ck-06", "How fast must a personal data breach be notified to the authority?",
     "personal data breach be notified", ["72 hours"],
     "Within 72 hours of the controller becoming aware of the breach.",
     "A qualifying personal data breach must be notified to the supervisory authority within 72 hours of awareness (see gdpr_overview.md#0)."),
    ("ck-07", "Which mechanisms make a cross-border data transfer lawful?",
     "mechanisms make a cross-border data transfer lawful", ["standard contractual clauses", "adequacy"],
     "An adequacy decision, standard contractual clauses, or binding corporate rules.",
     "Lawful transfer mechanisms are an adequacy decision for the destination, standard contractual clauses between the parties, or binding corporate rules for intra-group moves (see cross_border.md#0)."),
    ("ck-08", "What must be completed before transferring data to a new country?",
     "completed before transferring data to a new country", ["transfer impact assessment"],
     "A transfer impact assessment covering the destination's legal regime and supplementary measures.",
     "Before any new transfer, the exporting team completes a transfer impact assessment documenting the destination country, its government-access regime, and the supplementary measures applied (see cross_border.md#0)."),
    ("ck-09", "When must a privacy review be initiated?",
     "privacy review be initiated", ["before launch", "personal data"],
     "Before launch for any feature touching personal data and for material changes to reviewed flows.",
     "A privacy review must be initiated before launch whenever a feature collects, processes, or shares personal data, and again for material changes to a reviewed flow (see privacy_review.md#0)."),
    ("ck-10", "Who signs off a privacy review?",
     "signs off a privacy review", ["privacy reviewer"],
     "The privacy reviewer signs off before launch; risky launches also need counsel.",
     "The privacy reviewer signs off the review before launch, with an additional counsel signature for risky launches (see privacy_review.md#1)."),
    ("ck-11", "What is the first responsive step after a data incident is detected?",
     "first responsive step after a data incident", ["containment"],
     "Containment: cut the exposure path, revoke credentials, snapshot systems for forensics.",
     "The first responsive step after detection is containment, cutting the exposure path, revoking leaked credentials, and snapshotting affected systems for forensics (see incident_response.md#0)."),
    ("ck-12", "How quickly must a suspected data incident be triaged?",
     "suspected data incident be triaged", ["24 hours"],
     "Within 24 hours of the report.",
     "Every suspected data incident must be triaged within 24 hours of the report, assigning severity from data category, volume, and exposure (see incident_response.md#0)."),
    ("ck-13", "What must be signed before sharing personal data with a vendor?",
     "signed before sharing personal data with a vendor", ["data processing agreement"],
     "A data processing agreement fixing purposes, security baseline, subprocessors, and deletion duties.",
     "No personal data may be shared with a vendor until a data processing agreement is signed covering purposes, security baseline, subprocessor approval, and end-of-contract deletion (see vendor_risk.md#0)."),
    ("ck-14", "How often are vendor security assessments refreshed?",
     "vendor security assessments refreshed", ["annually"],
     "Annually, and sooner after a vendor breach or architecture change.",
     "Vendor security assessments are refreshed annually, and sooner when the vendor reports a breach or materially changes its architecture (see vendor_risk.md#0)."),
    ("ck-15", "What rights does the CCPA give consumers?",
     "rights does the CCPA give", ["opt out", "deletion"],
     "The rights to know, deletion, to opt out of sale or sharing, and non-discrimination.",
     "The CCPA grants the right to know, the right to request deletion, the right to opt out of sale or sharing, and the right to non-discrimination (see ccpa_overview.md#0)."),
    ("ck-16", "Which businesses are in scope for the CCPA?",
     "businesses are in scope for the CCPA", ["25 million"],
     "Those over 25 million dollars revenue, or handling data of 100,000+ consumers, or earning half their revenue from selling data.",
     "CCPA scope covers businesses above 25 million dollars in annual revenue, or handling personal information of 100,000 or more consumers or households, or deriving half their revenue from selling or sharing it (see ccpa_overview.md#0)."),
    ("ck-17", "How often is access to sensitive datasets recertified?",
     "access to sensitive datasets recertified", ["quarterly"],
     "Quarterly, with approvers confirming or revoking every grant.",
     "Access to sensitive datasets is recertified quarterly; approvers confirm or revoke each grant against the justification and last-use timestamp (see access_reviews.md#0)."),
    ("ck-18", "What happens to access grants that are not recertified?",
     "access grants that are not recertified", ["revoked"],
     "They are revoked automatically within an hour of the campaign deadline.",
     "Grants not recertified by the campaign deadline are revoked automatically, taking effect within one hour, and re-granting requires a fresh request (see access_reviews.md#0)."),
    ("ck-19", "What does a record of processing activities contain?",
     "record of processing activities contain", ["purposes", "categories"],
     "Purposes, data and subject categories, recipients, transfers with safeguards, retention periods, and security measures.",
     "The record documents the purposes of processing, the categories of personal data and data subjects, recipients, cross-border transfers with safeguards, retention periods, and security measures (see records_processing.md#0)."),
    ("ck-20", "Who maintains the record of processing activities?",
     "maintains the record of processing activities", ["privacy office"],
     "The privacy office maintains it, with entries fed automatically from closed privacy reviews.",
     "The privacy office maintains the record of processing activities and reviews every entry at least yearly, with closed privacy reviews upserting entries automatically (see records_processing.md#0)."),
]

REGULATION_CASES = [
    ("rk-01", "What is the maximum fine tier under the GDPR?",
     "maximum fine tier under the GDPR", ["4%", "20 million"],
     "Up to 20 million euros or 4% of worldwide annual turnover, whichever is higher.",
     "The upper GDPR fine tier reaches 20 million euros or 4% of total worldwide annual turnover, whichever is higher (see gdpr_overview.md#0)."),
    ("rk-02", "When must an organisation appoint a data protection officer?",
     "appoint a data protection officer", ["large scale"],
     "When core activities involve large scale systematic monitoring or large scale special-category processing, or for public authorities.",
     "A data protection officer is required for public authorities and wherever core activities involve large scale systematic monitoring or large scale processing of special categories (see gdpr_overview.md#0)."),
    ("rk-03", "What does the right to data portability cover?",
     "right to data portability", ["machine-readable"],
     "Receiving provided personal data in a structured, commonly used, machine-readable format and transmitting it to another controller.",
     "Data portability lets a person receive the personal data they provided in a structured, commonly used, machine-readable format and move it to another controller (see gdpr_overview.md#0)."),
    ("rk-04", "When does the CCPA private right of action apply?",
     "private right of action", ["data breach", "unencrypted"],
     "After certain data breaches involving unencrypted or unredacted personal information.",
     "The CCPA private right of action applies after a data breach involving unencrypted and unredacted personal information attributable to missing reasonable security (see ccpa_overview.md#0)."),
    ("rk-05", "What does a transfer impact assessment document?",
     "transfer impact assessment document", ["destination country"],
     "The destination country's legal regime, the data categories, and the supplementary measures applied.",
     "A transfer impact assessment documents the destination country and its government-access regime, the categories of personal data moved, and the supplementary measures such as origin-held encryption keys (see cross_border.md#0)."),
    ("rk-06", "What is the storage limitation principle?",
     "storage limitation principle", ["no longer than necessary"],
     "Personal data may be kept no longer than necessary for the purposes it was collected for.",
     "Storage limitation means personal data is kept no longer than necessary for the purposes it was collected for, with new purposes needing a fresh assessment (see gdpr_overview.md#0)."),
    ("rk-07", "When is a data protection impact assessment mandatory?",
     "impact assessment mandatory", ["high risk"],
     "When the processing is likely to produce a high risk to people's rights, such as large-scale profiling.",
     "A data protection impact assessment is mandatory when processing is likely to create a high risk for people, for example systematic large-scale profiling or monitoring (see privacy_review.md#0)."),
    ("rk-08", "How is personal data defined under the GDPR?",
     "personal data defined", ["identifiable"],
     "Any information relating to an identified or identifiable natural person, including indirect identification.",
     "Personal data is any information relating to an identified or identifiable natural person, where identifiability includes indirect means like device identifiers joined with location traces (see gdpr_overview.md#0)."),
    ("rk-09", "What must a processor obtain before engaging a subprocessor?",
     "before engaging a subprocessor", ["written authorization"],
     "Prior written authorization from the controller, with obligations flowing down.",
     "A processor needs prior written authorization before engaging a subprocessor, and the subprocessor inherits every obligation of the main agreement (see vendor_risk.md#0)."),
    ("rk-10", "When must a CCPA notice at collection be given?",
     "notice at collection", ["at or before"],
     "At or before the point of collection, naming categories and purposes.",
     "Notice at collection must be given at or before the point where personal information is collected, naming the categories and purposes (see ccpa_overview.md#0)."),
]

# (case_id, artifact_id, question, keywords template)  keywords drawn from the fixture
FETCH_CASES = [
    ("au-01", "ART-001", "Who is the owner of compliance artifact ART-001?", "owner"),
    ("au-02", "ART-002", "What is the status of artifact ART-002?", "status"),
    ("au-03", "ART-003", "Who owns artifact ART-003?", "owner"),
    ("au-04", "ART-004", "What is the status of artifact ART-004?", "status"),
    ("au-05", "ART-005", "Who is the owner of artifact ART-005?", "owner"),
    ("au-06", "ART-006", "Who owns artifact ART-006?", "owner"),
    ("au-07", "ART-007", "What is the status of artifact ART-007?", "status"),
    ("au-08", "ART-008", "Who is the owner of artifact ART-008?", "owner"),
    ("au-09", "ART-009", "What is the status of artifact ART-009?", "status"),
    ("au-10", "ART-010", "Who owns artifact ART-010?", "owner"),
    ("au-11", "ART-011", "Who is the owner of policy artifact ART-011?", "owner"),
    ("au-12", "ART-012", "Who owns policy ART-012?", "owner"),
    ("au-13", "ART-013", "Who is the owner of policy ART-013?", "owner"),
    ("au-14", "ART-014", "What is the status of policy ART-014?", "status"),
    ("au-15", "ART-015", "Who owns policy ART-015?", "owner"),
    ("au-16", "ART-016", "Who is the owner of dataset ART-016?", "owner"),
]

# (case_id, artifact_id, question, question rule phrase, search query)
SEARCH_CASES = [
    ("au-17", "ART-021",
     "Which dataset covers payments chargebacks and disputes, and who owns it?",
     "payments chargebacks and disputes", "payments chargeback warehouse"),
    ("au-18", "ART-022",
     "Which system enforces cross-border transfer blocks at the egress, and who owns it?",
     "cross-border transfer blocks at the egress", "egress transfer proxy"),
    ("au-19", "ART-023",
     "Which system is the record for consent grants and withdrawals?",
     "record for consent grants and withdrawals", "consent ledger"),
    ("au-20", "ART-024",
     "Which system fans out account deletion jobs across stores?",
     "fans out account deletion jobs", "deletion orchestrator"),
]

ROUTER_EXAMPLES = [
    ("What is the definition of personally identifiable information?", "FastTrack"),
    ("How does pseudonymization differ from anonymization?", "FastTrack"),
    ("What are the GDPR data subject rights?", "FastTrack"),
    ("Give an overview of our data retention principles.", "FastTrack"),
    ("What is a record of processing activities?", "FastTrack"),
    ("Who owns the user-signals ingestion dataset review?", "FullAgentic"),
    ("What is the current status of the checkout telemetry privacy review?", "FullAgentic"),
    ("List artifacts related to the payments data warehouse.", "FullAgentic"),
    ("Which policies apply to the messaging attachments bucket?", "FullAgentic"),
    ("Find the review that covers photo upload retention and show its owner.", "FullAgentic"),
]

# (query, expected label, mock reply label, rule phrase)
ROUTER_EVAL_QUERIES = [
    ("What does data minimization mean in practice?", "FastTrack", "FastTrack",
     "data minimization mean"),
    ("Summarize the lawful bases for processing under the GDPR.", "FastTrack", "FastTrack",
     "Summarize the lawful bases"),
    ("How long should operational logs be kept?", "FastTrack", "FastTrack",
     "should operational logs be kept"),
    ("What is a data processing agreement?", "FastTrack", "FastTrack",
     "is a data processing agreement"),
    ("Explain the difference between a controller and a processor.", "FastTrack", "FastTrack",
     "difference between a controller and a processor"),
    ("What counts as personal data?", "FastTrack", "FastTrack",
     "counts as personal data"),
    ("When is a privacy impact assessment required?", "FastTrack", "FastTrack",
     "privacy impact assessment required"),
    ("Is consent required to process employee payroll data?", "FastTrack", "FullAgentic",
     "employee payroll data"),
    ("Who is the owner of compliance artifact ART-214?", "FullAgentic", "FullAgentic",
     "ART-214"),
    ("What is the current status of review ART-377?", "FullAgentic", "FullAgentic",
     "ART-377"),
    ("List artifacts related to ART-152.", "FullAgentic", "FullAgentic",
     "ART-152"),
    ("Find the review covering the loyalty program signup flow and show its owner.",
     "FullAgentic", "FullAgentic", "loyalty program signup flow"),
    ("Which policies apply to the driver telemetry dataset?", "FullAgentic", "FullAgentic",
     "driver telemetry dataset"),
    ("Who approved the most recent change to the payments retention review?", "FullAgentic",
     "FullAgentic", "payments retention review"),
    ("What changed in the latest revision of our cross-border transfer review?", "FullAgentic",
     "FastTrack", "latest revision of our cross-border transfer review"),
]


def check(condition: bool, message: str) -> None:
    if not condition:
        raise SystemExit(f"fixture check failed: {message}")


def write_jsonl(path: Path, rows: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")


def write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def build_benchmarks(store: ArtifactStore):
    knowledge_rows = []
    for case_id, question, phrase, keywords, reference, answer in KNOWLEDGE_CASES + REGULATION_CASES:
        check(phrase in question, f"{case_id}: rule phrase not in question")
        for kw in keywords:
            check(kw.lower() in answer.lower(), f"{case_id}: keyword {kw!r} missing from answer")
            check(kw.lower() not in GENERIC_ANSWER.lower(), f"{case_id}: keyword {kw!r} in generic answer")
            check(kw.lower() not in AGENT_GENERIC.lower(), f"{case_id}: keyword {kw!r} in agent generic")
        check(".md#" in answer, f"{case_id}: answer has no chunk citation")
    for rows, cases in (
        (knowledge_rows, KNOWLEDGE_CASES),
    ):
        for case_id, question, _, keywords, reference, _ in cases:
            rows.append(
                {"case_id": case_id, "question": question,
                 "reference_answer": reference, "keywords": keywords}
            )
    regulation_rows = [
        {"case_id": c, "question": q, "reference_answer": ref, "keywords": kw}
        for c, q, _, kw, ref, _ in REGULATION_CASES
    ]

    artifact_rows = []
    for case_id, art_id, question, which in FETCH_CASES:
        artifact = get_artifact(store, art_id)
        keywords = [artifact.owner] if which == "owner" else [artifact.status]
        artifact_rows.append({"case_id": case_id, "question": question, "keywords": keywords})
    for case_id, art_id, question, phrase, query in SEARCH_CASES:
        check(phrase in question, f"{case_id}: rule phrase not in question")
        artifact = get_artifact(store, art_id)
        hits = search_artifacts(store, query, 5)
        check(hits and hits[0][0].artifact_id == art_id,
              f"{case_id}: search {query!r} does not rank {art_id} first")
        artifact_rows.append(
            {"case_id": case_id, "question": question,
             "keywords": [art_id, artifact.owner]}
        )
    return knowledge_rows, regulation_rows, artifact_rows


def build_generator_script() -> dict:
    rules = []
    for case_id, question, phrase, keywords, reference, answer in KNOWLEDGE_CASES + REGULATION_CASES:
        rules.append(
            {"regex": r"(?s)Context:.*Question: [^\n]*" + phrase, "response": answer}
        )
    return {"rules": rules, "default_response": GENERIC_ANSWER}


def build_agent_script(store: ArtifactStore) -> dict:
    final_rules = []
    action_rules = []
    for case_id, art_id, question, which in FETCH_CASES:
        artifact = get_artifact(store, art_id)
        answer = (
            f"{art_id} ({artifact.name}) is a {artifact.kind} owned by "
            f"{artifact.owner}; its status is {artifact.status}."
        )
        final_rules.append(
            {"contains": f'"artifact_id": "{art_id}"',
             "response": f"THOUGHT: The fetched record answers the question.\nFINAL: {answer}"}
        )
        action_rules.append(
            {"contains": art_id,
             "response": ("THOUGHT: The question names a specific artifact id; fetch it.\n"
                          f'ACTION: fetch_artifact {{"artifact_id": "{art_id}"}}')}
        )
    for case_id, art_id, question, phrase, query in SEARCH_CASES:
        artifact = get_artifact(store, art_id)
        answer = (
            f"That is {art_id} ({artifact.name}), a {artifact.kind} owned by "
            f"{artifact.owner}; its status is {artifact.status}."
        )
        final_rules.append(
            {"contains": f"{art_id} [",
             "response": f"THOUGHT: The search result identifies the artifact.\nFINAL: {answer}"}
        )
        action_rules.append(
            {"contains": phrase,
             "response": ("THOUGHT: No id is given; search the artifact store by description.\n"
                          f'ACTION: search_artifacts {{"query": "{query}"}}')}
        )
    return {"rules": final_rules + action_rules, "default_response": AGENT_GENERIC}


def build_judge_script() -> dict:
    # Grounded demo answers cite chunk ids like "(see gdpr_overview.md#0)".
    return {
        "rules": [{"contains": ".md#", "response": "5"}],
        "default_response": "2",
    }


def build_router_script() -> dict:
    # Rules anchor on the final "Query: ..." line so prior turns quoted in the
    # history cannot re-trigger the artifact route.
    rules = [
        {"regex": f"Query: [^\\n]*{re.escape(phrase)}", "response": "FullAgentic"}
        for _, _, _, phrase, _ in SEARCH_CASES
    ]
    rules.append({"regex": r"Query: [^\n]*ART-", "response": "FullAgentic"})
    return {"rules": rules, "default_response": "FastTrack"}


def build_router_eval_script() -> dict:
    rules = []
    for query, _expected, reply, phrase in ROUTER_EVAL_QUERIES:
        check(phrase in query, f"router eval: phrase {phrase!r} not in query")
        for example, _ in ROUTER_EXAMPLES:
            check(phrase not in example,
                  f"router eval: phrase {phrase!r} collides with in-context example")
        for other, _, _, _ in ROUTER_EVAL_QUERIES:
            if other != query:
                check(phrase not in other,
                      f"router eval: phrase {phrase!r} collides with query {other!r}")
        rules.append({"contains": phrase, "response": reply})
    return {"rules": rules, "default_response": "FullAgentic"}


def profiles_block(script_dir: str) -> list[dict]:
    def profile(name: str, script: str) -> dict:
        return {
            "profile_name": name,
            "endpoint": "mock",
            "model_id": f"scripted-{name.replace(':', '-')}",
            "temperature": 0.0,
            "max_output_tokens": 512,
            "timeout": 30,
            "mock_script": f"{script_dir}/{script}",
        }

    return [
        profile("router", "router.json"),
        profile("generator", "generator.json"),
        profile("agent", "agent.json"),
        profile("judge", "judge.json"),
        profile("specialist:data_retention", "specialist.json"),
        profile("specialist:cross_border_transfers", "specialist.json"),
    ]


def build_demo_config() -> dict:
    return {
        "profiles": profiles_block("mocks"),
        "router": {
            "criteria_text": (
                "Route to FullAgentic when the query requires information about "
                "any internal artifact (a specific review, policy record, dataset, "
                "or system, whether referenced by id, name, or description); "
                "otherwise route to FastTrack."
            ),
            "examples": [{"query": q, "label": label} for q, label in ROUTER_EXAMPLES],
            "fallback": "FullAgentic",
            "profile_name": "router",
        },
        "agent": {"profile_name": "agent", "max_steps": 8, "stop_on_repeat": True},
        "generator_profile": "generator",
        "judge": {"profile_name": "judge", "threshold": 4},
        "retrieval": {
            "corpus_dir": "corpus",
            "mode": "lexical",
            "target_tokens": 120,
            "overlap_tokens": 16,
            "min_chunk_tokens": 20,
            "k": 5,
        },
        "artifacts_path": "artifacts.json",
        "specialist_domains": ["data_retention", "cross_border_transfers"],
        "service": {"host": "127.0.0.1", "port": 8080, "data_dir": None},
        "mode": "auto",
        "eval": {"concurrency": 4},
    }


def build_router_eval_config() -> dict:
    config = build_demo_config()
    config["profiles"] = profiles_block("../demo/mocks")
    for p in config["profiles"]:
        if p["profile_name"] == "router":
            p["mock_script"] = "eval_mock.json"
    config["retrieval"]["corpus_dir"] = "../demo/corpus"
    config["artifacts_path"] = "../demo/artifacts.json"
    return config


def check_static_prompt_clean(store: ArtifactStore) -> None:
    """No fixture artifact id may appear in the static agent prompt text,
    otherwise per-artifact mock rules would fire for every query."""
    from cba.agent import DEFAULT_GUIDING_PROMPT, OUTPUT_GRAMMAR
    from cba.gateway import Gateway, ModelProfile
    from cba.retrieval import Chunk, build_index
    from cba.tools import catalog_default

    gateway = Gateway(
        [ModelProfile(profile_name=f"specialist:{d}", endpoint="mock", model_id="m")
         for d in ("data_retention", "cross_border_transfers")]
    )
    index = build_index(
        [Chunk(chunk_id="x#0", doc_id="x", text="placeholder words", token_count=2, position=0)]
    )
    catalog = catalog_default(
        store, index, gateway,
        specialist_domains=["data_retention", "cross_border_transfers"],
    )
    static_text = "\n".join([DEFAULT_GUIDING_PROMPT, OUTPUT_GRAMMAR, catalog.render_specs()])
    for artifact_id in store.ids():
        check(artifact_id not in static_text,
              f"{artifact_id} leaks into the static agent prompt")


def main() -> None:
    store = ArtifactStore.load(DATA / "demo" / "artifacts.json")
    check(len(store) == 25, "expected 25 artifacts in the demo fixture")
    check_static_prompt_clean(store)

    knowledge, regulation, artifact = build_benchmarks(store)
    write_jsonl(DATA / "benchmarks" / "compliance_knowledge.jsonl", knowledge)
    write_jsonl(DATA / "benchmarks" / "regulation_knowledge.jsonl", regulation)
    write_jsonl(DATA / "benchmarks" / "artifact_understanding.jsonl", artifact)

    write_json(DATA / "demo" / "mocks" / "generator.json", build_generator_script())
    write_json(DATA / "demo" / "mocks" / "agent.json", build_agent_script(store))
    write_json(DATA / "demo" / "mocks" / "judge.json", build_judge_script())
    write_json(DATA / "demo" / "mocks" / "router.json", build_router_script())
    write_json(
        DATA / "demo" / "mocks" / "specialist.json",
        {"rules": [], "default_response": SPECIALIST_ANSWER},
    )
    write_json(DATA / "demo" / "config.json", build_demo_config())

    write_jsonl(
        DATA / "router" / "eval_queries.jsonl",
        [{"query": q, "expected": e} for q, e, _, _ in ROUTER_EVAL_QUERIES],
    )
    write_json(DATA / "router" / "eval_mock.json", build_router_eval_script())
    write_json(DATA / "router" / "eval_config.json", build_router_eval_config())

    counts = {
        "knowledge": len(knowledge),
        "regulation": len(regulation),
        "artifact": len(artifact),
        "router_eval": len(ROUTER_EVAL_QUERIES),
    }
    print(f"fixtures written: {counts}")


if __name__ == "__main__":
    main()
