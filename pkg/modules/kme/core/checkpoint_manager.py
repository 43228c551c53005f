"""
Checkpoint Manager for Reward Engines

Handles engine checkpoint save/load/clear so long runs can be inspected or
resumed. A checkpoint is the clustering snapshot plus objective spec, neighbor
cache and instrumentation counters, stored as JSON (exact float round trip).
"""

import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

from .reward_engine import RewardEngine

logger = logging.getLogger(__name__)


class CheckpointManager:
    """
    Manages engine checkpoint files.

    Responsibilities:
    - Save an engine (plus free-form run metadata) to JSON
    - Load an engine back, bit-identical
    - Clear the checkpoint after a run no longer needs it
    """

    def __init__(self, checkpoint_file: Path = Path("./kme_checkpoint.json")):
        """
        Args:
            checkpoint_file: Path to checkpoint JSON file
        """
        self.checkpoint_file = Path(checkpoint_file)
        logger.debug(f"Checkpoint manager initialized: {self.checkpoint_file}")

    def save_checkpoint(self, engine: RewardEngine, metadata: Optional[Dict[str, Any]] = None) -> bool:
        """
        Save the engine state.

        Args:
            engine: Engine to persist
            metadata: Extra run information (batch index, config, ...)

        Returns:
            True if checkpoint saved successfully, False otherwise
        """
        checkpoint_data = {
            'timestamp': str(datetime.now()),
            'metadata': metadata or {},
            'engine': engine.to_dict(),
        }

        try:
            self.checkpoint_file.parent.mkdir(parents=True, exist_ok=True)
            with open(self.checkpoint_file, 'w') as f:
                json.dump(checkpoint_data, f)

            logger.info(
                f"💾 Checkpoint saved: {engine.commit_count} commits, "
                f"k={engine.model.k}, d={engine.model.d} → {self.checkpoint_file}"
            )
            return True

        except Exception as e:
            logger.warning(f"⚠️ Failed to save checkpoint: {e}")
            return False

    def load_checkpoint(self) -> Optional[Dict[str, Any]]:
        """
        Load the raw checkpoint record.

        Returns:
            Checkpoint dictionary, or None if no readable checkpoint exists
        """
        try:
            if self.checkpoint_file.exists():
                with open(self.checkpoint_file, 'r') as f:
                    return json.load(f)
        except Exception as e:
            logger.warning(f"⚠️ Failed to load checkpoint: {e}")
        return None

    def load_engine(self) -> Optional[RewardEngine]:
        """
        Rebuild the engine stored in the checkpoint.

        Returns:
            RewardEngine, or None if no checkpoint exists
        """
        checkpoint = self.load_checkpoint()
        if not checkpoint or 'engine' not in checkpoint:
            return None

        engine = RewardEngine.from_dict(checkpoint['engine'])
        logger.info(
            f"📂 Checkpoint loaded: {engine.commit_count} commits, "
            f"k={engine.model.k}, d={engine.model.d}"
        )
        return engine

    def clear_checkpoint(self) -> bool:
        """
        Remove the checkpoint file.

        Returns:
            True if cleared (or already absent), False otherwise
        """
        try:
            if self.checkpoint_file.exists():
                self.checkpoint_file.unlink()
                logger.info("✅ Checkpoint cleared")
            return True

        except Exception as e:
            logger.warning(f"⚠️ Failed to clear checkpoint: {e}")
            return False

    def has_checkpoint(self) -> bool:
        return self.checkpoint_file.exists()

    def get_checkpoint_info(self) -> Optional[Dict[str, Any]]:
        """
        Summary of the stored checkpoint without rebuilding the engine.

        Returns:
            Dictionary with checkpoint metadata or None
        """
        checkpoint = self.load_checkpoint()
        if not checkpoint:
            return None

        engine = checkpoint.get('engine', {})
        counters = engine.get('counters', {})
        model = engine.get('model', {})
        return {
            'timestamp': checkpoint.get('timestamp'),
            'k': model.get('k'),
            'd': model.get('d'),
            'commit_count': counters.get('commit_count', 0),
            'pathological_count': counters.get('pathological_count', 0),
            'metadata': checkpoint.get('metadata', {}),
        }
