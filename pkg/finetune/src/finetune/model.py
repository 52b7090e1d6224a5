"""Compact transformer encoder for sequence classification.

Two pre-softmax design constraints shape this module. First, every
forward-pass operation must have a counterpart in the exported compute
graph, so attention is spelled out with plain matmuls instead of fused
kernels. Second, the network trains from random init on a small corpus,
so it is deliberately narrow: a few layers of standard post-norm
attention blocks over learned token plus position embeddings, mean
pooling over unpadded positions, and a linear head.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import torch
from torch import nn

MASKED_SCORE_OFFSET = -10000.0


@dataclass
class EncoderConfig:
    vocab_size: int
    max_seq_len: int = 64
    hidden_size: int = 128
    num_layers: int = 2
    num_heads: int = 4
    ffn_size: int = 512
    num_classes: int = 8
    dropout: float = 0.1
    layer_norm_eps: float = 1e-5
    init_range: float = 0.02

    def __post_init__(self) -> None:
        if self.hidden_size % self.num_heads:
            raise ValueError("hidden_size must divide evenly across heads")

    @property
    def head_size(self) -> int:
        return self.hidden_size // self.num_heads


class SelfAttention(nn.Module):
    """Multi-head scaled dot-product attention with an additive mask."""

    def __init__(self, config: EncoderConfig):
        super().__init__()
        self.num_heads = config.num_heads
        self.head_size = config.head_size
        self.scale = self.head_size ** -0.5
        self.query = nn.Linear(config.hidden_size, config.hidden_size)
        self.key = nn.Linear(config.hidden_size, config.hidden_size)
        self.value = nn.Linear(config.hidden_size, config.hidden_size)
        self.output = nn.Linear(config.hidden_size, config.hidden_size)
        self.drop = nn.Dropout(config.dropout)

    def forward(self, hidden: torch.Tensor,
                additive_mask: torch.Tensor) -> torch.Tensor:
        batch, seq_len, width = hidden.shape

        def heads(proj: nn.Linear) -> torch.Tensor:
            out = proj(hidden)
            return out.view(batch, seq_len, self.num_heads,
                            self.head_size).transpose(1, 2)

        q, k, v = heads(self.query), heads(self.key), heads(self.value)
        scores = q @ k.transpose(-1, -2) * self.scale + additive_mask
        probs = self.drop(torch.softmax(scores, dim=-1))
        context = (probs @ v).transpose(1, 2).reshape(batch, seq_len, width)
        return self.output(context)


class EncoderLayer(nn.Module):
    """Post-norm attention block with a tanh-GELU feed-forward."""

    def __init__(self, config: EncoderConfig):
        super().__init__()
        self.attention = SelfAttention(config)
        self.norm_attention = nn.LayerNorm(config.hidden_size,
                                           eps=config.layer_norm_eps)
        self.ffn_in = nn.Linear(config.hidden_size, config.ffn_size)
        self.ffn_out = nn.Linear(config.ffn_size, config.hidden_size)
        self.activation = nn.GELU(approximate="tanh")
        self.norm_ffn = nn.LayerNorm(config.hidden_size,
                                     eps=config.layer_norm_eps)
        self.drop = nn.Dropout(config.dropout)

    def forward(self, hidden: torch.Tensor,
                additive_mask: torch.Tensor) -> torch.Tensor:
        attended = self.drop(self.attention(hidden, additive_mask))
        hidden = self.norm_attention(hidden + attended)
        transformed = self.ffn_out(self.activation(self.ffn_in(hidden)))
        return self.norm_ffn(hidden + self.drop(transformed))


class TextEncoder(nn.Module):
    """Token ids + attention mask in, class logits out."""

    def __init__(self, config: EncoderConfig):
        super().__init__()
        self.config = config
        self.token_embedding = nn.Embedding(config.vocab_size,
                                            config.hidden_size, padding_idx=0)
        self.position_table = nn.Parameter(
            torch.zeros(config.max_seq_len, config.hidden_size))
        self.norm_embedding = nn.LayerNorm(config.hidden_size,
                                           eps=config.layer_norm_eps)
        self.layers = nn.ModuleList(
            EncoderLayer(config) for _ in range(config.num_layers))
        self.classifier = nn.Linear(config.hidden_size, config.num_classes)
        self.drop = nn.Dropout(config.dropout)
        self._init_weights()

    def _init_weights(self) -> None:
        std = self.config.init_range
        for module in self.modules():
            if isinstance(module, nn.Linear):
                nn.init.normal_(module.weight, std=std)
                nn.init.zeros_(module.bias)
            elif isinstance(module, nn.Embedding):
                nn.init.normal_(module.weight, std=std)
        nn.init.normal_(self.position_table, std=std)

    def forward(self, input_ids: torch.Tensor,
                attention_mask: torch.Tensor) -> torch.Tensor:
        seq_len = input_ids.shape[1]
        mask = attention_mask.to(self.position_table.dtype)
        additive = (1.0 - mask)[:, None, None, :] * MASKED_SCORE_OFFSET
        hidden = self.token_embedding(input_ids) + self.position_table[:seq_len]
        hidden = self.drop(self.norm_embedding(hidden))
        for layer in self.layers:
            hidden = layer(hidden, additive)
        # mean over real (unpadded) positions; markers count as real
        pooled = (hidden * mask[:, :, None]).sum(dim=1) \
            / mask.sum(dim=1, keepdim=True)
        return self.classifier(pooled)
