"""Classifier and encoder backends.

Two of each: a dependency-light deterministic path used in CI
(``tfidf_logistic`` classifier, ``hashing`` encoder) and a transformer path
for fidelity (``transformer`` for both roles) that loads torch /
transformers lazily and fails with the missing dependency's name when the
stack is absent.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.feature_extraction.text import HashingVectorizer, TfidfVectorizer
from sklearn.linear_model import LogisticRegression
from sklearn.metrics import log_loss

SLM_BACKENDS = ("tfidf_logistic", "transformer")
ENCODER_BACKENDS = ("hashing", "transformer")

PROB_FLOOR = 1e-12


class BackendUnavailableError(Exception):
    """A requested backend's dependency stack is not importable."""


class TrainingDivergedError(Exception):
    """Training produced a non-finite loss; carries the loss trace."""

    def __init__(self, message: str, loss_trace: list[float]):
        self.loss_trace = loss_trace
        super().__init__(f"{message}; loss trace: {loss_trace}")


def sanitize_row(probs) -> list[float]:
    """Engine sanitization rule: clamp to [1e-12, 1], renormalize, floor-lift.

    Applying it before writing means the engine's own sanitization is the
    identity on exported files.
    """
    clamped = [min(max(float(v), PROB_FLOOR), 1.0) for v in probs]
    total = math.fsum(clamped)
    scaled = [v / total for v in clamped]
    return [v if v >= PROB_FLOOR else PROB_FLOOR for v in scaled]


class TfidfLogisticSLM:
    """TF-IDF features + multinomial logistic regression; fully deterministic."""

    name = "tfidf_logistic"

    def __init__(self, seed: int, epochs: int = 200, learning_rate: float = 1.0):
        self.vectorizer = TfidfVectorizer(lowercase=True)
        self.model = LogisticRegression(
            C=learning_rate,
            max_iter=epochs,
            random_state=seed,
            solver="lbfgs",
        )
        self.num_classes: int | None = None

    def fit(self, texts, labels, num_classes: int) -> list[float]:
        if len(set(labels)) < 2:
            raise ValueError(
                "training split contains a single class; cannot fit a classifier"
            )
        self.num_classes = num_classes
        features = self.vectorizer.fit_transform(texts)
        self.model.fit(features, labels)
        # loss over the classes the model actually saw; unseen corpus classes
        # are filled at prediction time
        loss = float(
            log_loss(
                labels,
                self.model.predict_proba(features),
                labels=[int(c) for c in self.model.classes_],
            )
        )
        trace = [loss]
        if not math.isfinite(loss):
            raise TrainingDivergedError("classifier training diverged", trace)
        return trace

    def predict_proba(self, texts) -> np.ndarray:
        raw = self.model.predict_proba(self.vectorizer.transform(texts))
        k = self.num_classes
        out = np.full((len(texts), k), PROB_FLOOR)
        for column, cls in enumerate(self.model.classes_):
            out[:, int(cls)] = raw[:, column]
        return out


class HashingEncoder:
    """Hashed bag-of-words embedding with a bias feature so no text maps to zero."""

    name = "hashing"

    def __init__(self, dim: int = 256):
        self.dim = dim
        self.vectorizer = HashingVectorizer(
            n_features=dim, alternate_sign=True, norm=None, lowercase=True
        )

    def encode(self, texts) -> np.ndarray:
        hashed = np.asarray(self.vectorizer.transform(texts).todense(), dtype=np.float64)
        with_bias = np.hstack([hashed, np.ones((len(texts), 1))])
        norms = np.linalg.norm(with_bias, axis=1, keepdims=True)
        return with_bias / norms


class TransformerSLM:
    """Fine-tuned sequence classifier; needs torch + transformers."""

    name = "transformer"

    def __init__(
        self,
        seed: int,
        epochs: int = 3,
        learning_rate: float = 2e-5,
        model_name: str = "distilbert-base-uncased",
        batch_size: int = 16,
    ):
        try:
            import torch  # noqa: F401
            import transformers  # noqa: F401
        except ImportError as exc:
            raise BackendUnavailableError(
                f"slm backend 'transformer' needs torch and transformers: {exc}"
            ) from None
        self.seed = seed
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.model_name = model_name
        self.batch_size = batch_size
        self.num_classes: int | None = None

    def fit(self, texts, labels, num_classes: int) -> list[float]:
        import torch
        from transformers import AutoModelForSequenceClassification, AutoTokenizer

        torch.manual_seed(self.seed)
        self.num_classes = num_classes
        self.tokenizer = AutoTokenizer.from_pretrained(self.model_name)
        self.model = AutoModelForSequenceClassification.from_pretrained(
            self.model_name, num_labels=num_classes
        )
        optimizer = torch.optim.AdamW(self.model.parameters(), lr=self.learning_rate)
        targets = torch.tensor(list(labels))
        trace: list[float] = []
        self.model.train()
        for _ in range(self.epochs):
            epoch_losses = []
            for start in range(0, len(texts), self.batch_size):
                batch_texts = list(texts[start : start + self.batch_size])
                batch = self.tokenizer(
                    batch_texts, truncation=True, padding=True, return_tensors="pt"
                )
                output = self.model(**batch, labels=targets[start : start + self.batch_size])
                optimizer.zero_grad()
                output.loss.backward()
                optimizer.step()
                epoch_losses.append(float(output.loss))
            trace.append(sum(epoch_losses) / len(epoch_losses))
            if not math.isfinite(trace[-1]):
                raise TrainingDivergedError("transformer fine-tuning diverged", trace)
        return trace

    def predict_proba(self, texts) -> np.ndarray:
        import torch

        self.model.eval()
        rows = []
        with torch.no_grad():
            for start in range(0, len(texts), self.batch_size):
                batch = self.tokenizer(
                    list(texts[start : start + self.batch_size]),
                    truncation=True,
                    padding=True,
                    return_tensors="pt",
                )
                logits = self.model(**batch).logits
                rows.append(torch.softmax(logits, dim=-1).numpy())
        return np.vstack(rows).astype(np.float64)


class TransformerEncoder:
    """Sentence-transformer embeddings; needs sentence-transformers."""

    name = "transformer"

    def __init__(self, model_name: str = "all-MiniLM-L6-v2"):
        try:
            import sentence_transformers  # noqa: F401
        except ImportError as exc:
            raise BackendUnavailableError(
                f"encoder backend 'transformer' needs sentence-transformers: {exc}"
            ) from None
        from sentence_transformers import SentenceTransformer

        self.model = SentenceTransformer(model_name)

    def encode(self, texts) -> np.ndarray:
        return np.asarray(
            self.model.encode(list(texts), normalize_embeddings=True), dtype=np.float64
        )


def make_slm(backend: str, seed: int, epochs: int, learning_rate: float):
    if backend == "tfidf_logistic":
        return TfidfLogisticSLM(seed=seed, epochs=epochs, learning_rate=learning_rate)
    if backend == "transformer":
        return TransformerSLM(seed=seed, epochs=epochs, learning_rate=learning_rate)
    raise ValueError(f"unknown slm backend {backend!r}; choose from {SLM_BACKENDS}")


def make_encoder(backend: str, dim: int = 256):
    if backend == "hashing":
        return HashingEncoder(dim=dim)
    if backend == "transformer":
        return TransformerEncoder()
    raise ValueError(f"unknown encoder backend {backend!r}; choose from {ENCODER_BACKENDS}")
