"""Single-call answer path: retrieve top-k context, ground the prompt, answer once."""

from __future__ import annotations

from typing import Optional

from .gateway import ChatRequest, ChatResponse, Gateway
from .retrieval import Index, RetrievalHit, search

DEFAULT_CONTEXT_K = 5

GROUNDING_INSTRUCTION = """\
You answer enterprise compliance questions. Ground every statement in the \
numbered context passages below when they are relevant; cite passages by \
their chunk id. If the context does not cover the question, say what is \
missing instead of guessing."""

PLAIN_INSTRUCTION = (
    "You answer enterprise compliance questions concisely and accurately."
)


def render_fasttrack_prompt(
    query: str, history: str, hits: list[RetrievalHit]
) -> list[tuple[str, str]]:
    """Grounded prompt: numbered context blocks (rank order), history, question."""
    if not hits:
        user = f"History:\n{history}\n\nQuestion: {query}" if history else f"Question: {query}"
        return [("system", PLAIN_INSTRUCTION), ("user", user)]
    context_blocks = [
        f"[{h.rank}] ({h.chunk.chunk_id}) {h.chunk.text}" for h in hits
    ]
    parts = ["Context:\n" + "\n\n".join(context_blocks)]
    if history:
        parts.append(f"History:\n{history}")
    parts.append(f"Question: {query}")
    return [("system", GROUNDING_INSTRUCTION), ("user", "\n\n".join(parts))]


def run_fasttrack(
    index: Optional[Index],
    gateway: Gateway,
    profile_name: str,
    query: str,
    history: str = "",
    k: int = DEFAULT_CONTEXT_K,
    use_rag: bool = True,
) -> tuple[str, list[RetrievalHit]]:
    """Retrieve-then-answer with exactly one completion call; hits empty when RAG is skipped."""
    if not query:
        raise ValueError("query must be non-empty")
    hits: list[RetrievalHit] = []
    if use_rag:
        if index is None:
            raise ValueError("use_rag requires an index")
        hits = search(index, query, k, gateway=gateway)
    messages = render_fasttrack_prompt(query, history, hits)
    response: ChatResponse = gateway.complete(
        ChatRequest(messages=messages, profile_name=profile_name)
    )
    return response.content, hits
