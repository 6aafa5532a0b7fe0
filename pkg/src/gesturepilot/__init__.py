"""Gesture-driven quadrotor piloting from a single onboard camera.

The package turns a video stream into piloting commands: a Haar cascade
finds the user's face once, a correlation-filter tracker follows the whole
body, a color-histogram model segments skin, two detectors localize the
gesturing hand, frame-vote buffers turn detections into rate-limited 3-D
commands, and a kinematic simulator closes the loop. A synthetic scene
renderer with exact ground truth drives the test suite end to end.
"""

from .cascade import (HaarCascade, detect_faces, load_cascade,
                      user_box_from_face)
from .commands import (PilotCommand, RateLimiter, StateBuffers,
                       generate_command, push_frame)
from .errors import (ContractError, FormatError, FrustumError,
                     InitializationError, InputError, PilotError,
                     TrackingLostError)
from .frames import Frame, load_ppm, load_sequence, save_ppm
from .geometry import BoundingBox
from .hands import BodyAnchors, HandDetection, body_anchors, detect_hands
from .pipeline import (FrameReport, PilotSession, PipelineConfig, annotate,
                       run_pipeline)
from .scene import CameraSpec, GroundTruth, Palette, Scenario, SceneSpec, render
from .sim import DroneState, SimParams, camera_to_body, step
from .skin import (SkinModel, detect_skin, erase_body_regions,
                   load_skin_model, train_skin_model)
from .tracker import TrackerParams, init_tracker, track

__version__ = "0.1.0"
