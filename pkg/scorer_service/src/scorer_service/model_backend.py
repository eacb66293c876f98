"""Optional backend wrapping a local sequence-to-sequence model.

Loads a Hugging Face encoder-decoder checkpoint (T5-style) and exposes the
three protocol operations.  Step log-probs are computed by constrained
next-token scoring: each requested candidate is mapped through the model
tokenizer and multi-token candidates are scored as chained decoder steps.
Inference is serialized behind one lock; this adapter is demo plumbing,
not a serving stack.
"""

from __future__ import annotations

import threading


class ModelBackendError(RuntimeError):
    pass


class Seq2SeqBackend:
    name = "seq2seq"

    def __init__(self, model_path: str, device: str = "cpu"):
        try:
            import torch
            from transformers import AutoModelForSeq2SeqLM, AutoTokenizer
        except ImportError as exc:
            raise ModelBackendError(
                f"model backend needs transformers and torch installed: {exc}"
            ) from exc
        try:
            self._tokenizer = AutoTokenizer.from_pretrained(model_path)
            self._model = AutoModelForSeq2SeqLM.from_pretrained(model_path)
        except Exception as exc:
            raise ModelBackendError(f"cannot load model from {model_path!r}: {exc}") from exc
        self._torch = torch
        self._model.eval().to(device)
        self._device = device
        self._lock = threading.Lock()
        self.tokenizer_name = type(self._tokenizer).__name__

    def _encoder_inputs(self, context: str):
        return self._tokenizer(context, return_tensors="pt").to(self._device)

    def _decoder_logprobs(self, context: str, prefix_ids: list[int]):
        """Log-softmax over the next token after forcing ``prefix_ids``."""
        torch = self._torch
        start = self._model.config.decoder_start_token_id
        decoder_ids = torch.tensor([[start] + prefix_ids], device=self._device)
        with torch.no_grad():
            logits = self._model(
                **self._encoder_inputs(context), decoder_input_ids=decoder_ids
            ).logits[0, -1]
        return torch.log_softmax(logits, dim=-1)

    def score(self, context: str, candidates: list[str]) -> list[float]:
        torch = self._torch
        out = []
        with self._lock:
            for candidate in candidates:
                if not candidate:
                    raise ValueError("candidates must be non-empty strings")
                target = self._tokenizer(candidate, return_tensors="pt").to(self._device)
                with torch.no_grad():
                    result = self._model(
                        **self._encoder_inputs(context), labels=target["input_ids"]
                    )
                n_tokens = target["input_ids"].shape[1]
                out.append(float(-result.loss) * n_tokens)
        return out

    def step(self, context: str, history: list[str], candidates: list[str]) -> list[float]:
        if not candidates:
            raise ValueError("candidate set must be non-empty")
        prefix = " ".join(history)
        prefix_ids = (
            self._tokenizer(prefix, add_special_tokens=False)["input_ids"]
            if prefix
            else []
        )
        out = []
        with self._lock:
            for token in candidates:
                text = (" " + token) if prefix else token
                piece_ids = self._tokenizer(text, add_special_tokens=False)["input_ids"]
                if not piece_ids:
                    raise ValueError(f"candidate {token!r} maps to no tokens")
                total = 0.0
                forced = list(prefix_ids)
                for piece in piece_ids:
                    logprobs = self._decoder_logprobs(context, forced)
                    total += float(logprobs[piece])
                    forced.append(piece)
                out.append(total)
        return out

    def generate(self, context: str) -> str:
        with self._lock:
            ids = self._model.generate(
                **self._encoder_inputs(context), max_new_tokens=128
            )
        return self._tokenizer.decode(ids[0], skip_special_tokens=True)
