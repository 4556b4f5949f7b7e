"""Adversarial training loop with checkpointing and a full config echo.

Hybrid mode trains a denoiser on conventionally processed one-bit maps;
E2E mode puts a trainable correlation kernel in front, warm-started from
the transmit code plus small noise, and learns both jointly.  The
discriminator is conditioned on the conventional map in both modes.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from .data import InterchangeCorpus, RdPairDataset
from .losses import LossConfig, discriminator_loss, generator_loss, gradient_penalty
from .networks import Discriminator, Generator
from .rd_layer import RdLayer


@dataclass(frozen=True)
class TrainConfig:
    mode: str = "hybrid"  # or "e2e"
    epochs: int = 5
    batch_size: int = 1
    lr_generator: float = 2e-4
    lr_discriminator: float = 1e-4
    adam_betas: tuple = (0.5, 0.9)
    base_channels: int = 16
    disc_channels: int = 32
    norm: str = "instance"
    crop: int = 128
    val_fraction: float = 0.25
    seed: int = 0
    kernel_init_noise: float = 0.01
    # supervised warm-up: the adversarial term joins the generator loss
    # at this epoch; the critic trains from the start either way
    adversarial_start_epoch: int = 4
    loss: LossConfig = field(default_factory=LossConfig)

    def __post_init__(self):
        if self.mode not in ("hybrid", "e2e"):
            raise ValueError(f"unknown mode: {self.mode}")
        if not 0.0 < self.val_fraction < 1.0:
            raise ValueError("val_fraction must be in (0, 1)")


class E2EGenerator(torch.nn.Module):
    """Trainable RD transform feeding the denoiser backbone.

    Takes the accumulated complex cube; the kernel output is shifted,
    cropped, and peak-normalized in-graph before the backbone.
    """

    def __init__(self, kernel, crop, base_channels, norm="instance",
                 init_noise=0.0, generator=None):
        super().__init__()
        kernel = torch.as_tensor(kernel, dtype=torch.float32)
        self.rd = RdLayer(kernel, accumulation=1, trainable=True,
                          init_noise=init_noise, generator=generator)
        self.backbone = Generator(base_channels=base_channels, norm=norm)
        self.crop = int(crop)

    def forward(self, acc_cube):
        q = self.rd(acc_cube)
        q = torch.fft.fftshift(q, dim=-1)
        m = q.shape[-1]
        start = (m - self.crop) // 2
        q = q[..., start : start + self.crop]
        mags = q.abs().flatten(start_dim=1).max(dim=1).values
        q = q / mags.view(-1, 1, 1).clamp_min(1e-20)
        return self.backbone(torch.stack([q.real, q.imag], dim=1))


class E2EPairDataset(torch.utils.data.Dataset):
    """(accumulated cube, conventional map, reference map) triples."""

    def __init__(self, corpus, indices=None, crop=128):
        base = RdPairDataset(corpus, indices=indices, crop=crop)
        indices = list(range(len(corpus.records))) if indices is None else list(indices)
        self.items = []
        for (conv, ref), i in zip(base.items, indices):
            cube = torch.from_numpy(
                np.ascontiguousarray(corpus.records[i].onebit)
            ).to(torch.complex64)
            acc = cube.reshape(
                cube.shape[0], -1, corpus.accumulation
            ).sum(dim=-1)
            self.items.append((acc, conv, ref))

    def __len__(self):
        return len(self.items)

    def __getitem__(self, idx):
        return self.items[idx]


def peak_normalize_channels(maps):
    """Scale each (re, im) map in the batch to unit peak magnitude.

    The evaluation metrics are invariant to map scale, so the losses see
    the same normalization; otherwise a uniform shrink of the output
    would look like progress to the L1 term while worsening the metric.
    """
    mags = (maps[:, 0] ** 2 + maps[:, 1] ** 2).sqrt()
    peaks = mags.flatten(start_dim=1).max(dim=1).values
    return maps / peaks.view(-1, 1, 1, 1).clamp_min(1e-20)


def _split_indices(count, val_fraction):
    n_val = max(1, int(round(count * val_fraction)))
    if n_val >= count:
        raise ValueError("corpus too small for the requested validation split")
    return list(range(count - n_val)), list(range(count - n_val, count))


def save_checkpoint(path, model, cfg, corpus):
    torch.save(
        {
            "config": dataclasses.asdict(cfg),
            "state_dict": model.state_dict(),
            "code": corpus.code,
            "accumulation": corpus.accumulation,
        },
        path,
    )


def load_checkpoint(path):
    blob = torch.load(path, weights_only=False)
    cfg_dict = dict(blob["config"])
    cfg_dict["loss"] = LossConfig(**cfg_dict["loss"])
    cfg_dict["adam_betas"] = tuple(cfg_dict["adam_betas"])
    cfg = TrainConfig(**cfg_dict)
    if cfg.mode == "hybrid":
        model = Generator(base_channels=cfg.base_channels, norm=cfg.norm)
    else:
        model = E2EGenerator(blob["code"], cfg.crop, cfg.base_channels,
                             norm=cfg.norm)
    model.load_state_dict(blob["state_dict"])
    model.eval()
    return model, cfg


def train(interchange_dir, out_dir, cfg=TrainConfig()):
    """Train on an interchange corpus; returns a result dict.

    Writes ``checkpoint.pt`` and ``run_log.txt`` (full config echo plus
    per-epoch losses and validation MSE) into ``out_dir``.
    """
    from .evaluate import evaluate_pairs, mean_mse

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    torch.manual_seed(cfg.seed)

    corpus = InterchangeCorpus.load(interchange_dir)
    train_idx, val_idx = _split_indices(len(corpus.records), cfg.val_fraction)

    gen_rng = torch.Generator().manual_seed(cfg.seed)
    if cfg.mode == "hybrid":
        model = Generator(base_channels=cfg.base_channels, norm=cfg.norm)
        train_data = RdPairDataset(corpus, indices=train_idx, crop=cfg.crop)
        val_pairs = RdPairDataset(corpus, indices=val_idx, crop=cfg.crop)
    else:
        model = E2EGenerator(corpus.code, cfg.crop, cfg.base_channels,
                             norm=cfg.norm, init_noise=cfg.kernel_init_noise,
                             generator=gen_rng)
        train_data = E2EPairDataset(corpus, indices=train_idx, crop=cfg.crop)
        val_pairs = E2EPairDataset(corpus, indices=val_idx, crop=cfg.crop)

    disc = Discriminator(base_channels=cfg.disc_channels)
    opt_g = torch.optim.Adam(model.parameters(), lr=cfg.lr_generator,
                             betas=cfg.adam_betas)
    opt_d = torch.optim.Adam(disc.parameters(), lr=cfg.lr_discriminator,
                             betas=cfg.adam_betas)
    loader = torch.utils.data.DataLoader(
        train_data, batch_size=cfg.batch_size, shuffle=True,
        generator=torch.Generator().manual_seed(cfg.seed),
    )

    log_lines = ["run config:"]
    for key, value in dataclasses.asdict(cfg).items():
        if key == "loss":
            for lk, lv in value.items():
                log_lines.append(f"  {lk} = {lv}")
        else:
            log_lines.append(f"  {key} = {value}")
    log_lines.append(f"  train_records = {len(train_idx)}")
    log_lines.append(f"  val_records = {len(val_idx)}")

    baseline_rows = evaluate_pairs(None, val_pairs, "conventional-onebit")
    baseline = mean_mse(baseline_rows)
    log_lines.append(f"identity baseline val mse = {baseline:.6e}")

    history = []
    for epoch in range(cfg.epochs):
        model.train()
        epoch_g, epoch_d, steps = 0.0, 0.0, 0
        for batch in loader:
            if cfg.mode == "hybrid":
                conv, ref = batch
                gen_in = conv
            else:
                acc, conv, ref = batch
                gen_in = acc
            fake = peak_normalize_channels(model(gen_in))

            real_pair = torch.cat([conv, ref], dim=1)
            fake_pair = torch.cat([conv, fake.detach()], dim=1)
            gp = gradient_penalty(disc, real_pair, fake_pair)
            d_loss = discriminator_loss(
                disc(real_pair), disc(fake_pair), gp, cfg.loss.lambda_gp
            )
            opt_d.zero_grad()
            d_loss.backward()
            opt_d.step()

            if epoch >= cfg.adversarial_start_epoch:
                scores = disc(torch.cat([conv, fake], dim=1))
            else:
                scores = torch.zeros(fake.shape[0])
            g_loss, parts = generator_loss(fake, ref, scores, cfg.loss)
            opt_g.zero_grad()
            g_loss.backward()
            opt_g.step()

            g_value, d_value = g_loss.item(), d_loss.item()
            if not (math.isfinite(g_value) and math.isfinite(d_value)):
                raise RuntimeError(
                    f"non-finite loss at epoch {epoch}: g={g_value} d={d_value}"
                )
            epoch_g += g_value
            epoch_d += d_value
            steps += 1

        val_mse = mean_mse(evaluate_pairs(model, val_pairs, "denoised"))
        history.append(
            {
                "epoch": epoch,
                "g_loss": epoch_g / steps,
                "d_loss": epoch_d / steps,
                "val_mse": val_mse,
            }
        )
        log_lines.append(
            f"epoch {epoch}: g_loss {epoch_g / steps:.4f} "
            f"d_loss {epoch_d / steps:.4f} val_mse {val_mse:.6e}"
        )

    checkpoint_path = out_dir / "checkpoint.pt"
    save_checkpoint(checkpoint_path, model, cfg, corpus)
    (out_dir / "run_log.txt").write_text("\n".join(log_lines) + "\n")
    (out_dir / "history.json").write_text(json.dumps(history, indent=1))
    return {
        "history": history,
        "baseline_val_mse": baseline,
        "final_val_mse": history[-1]["val_mse"],
        "checkpoint": checkpoint_path,
        "model": model,
        "val_dataset": val_pairs,
    }


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="rdgan-train", description="train a reconstruction model"
    )
    parser.add_argument("--corpus", required=True, help="interchange directory")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--mode", choices=("hybrid", "e2e"), default="hybrid")
    parser.add_argument("--epochs", type=int, default=5)
    parser.add_argument("--batch-size", type=int, default=4)
    parser.add_argument("--base-channels", type=int, default=16)
    parser.add_argument("--crop", type=int, default=128)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    cfg = TrainConfig(
        mode=args.mode,
        epochs=args.epochs,
        batch_size=args.batch_size,
        base_channels=args.base_channels,
        crop=args.crop,
        seed=args.seed,
    )
    result = train(args.corpus, args.out, cfg)
    print(
        f"baseline val mse {result['baseline_val_mse']:.6e} -> "
        f"trained {result['final_val_mse']:.6e}"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
