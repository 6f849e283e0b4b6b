"""World and episode generation tests."""

from __future__ import annotations

import math

import numpy as np
import pytest

from solnav.core import FORWARD, STOP, Pose
from solnav.planner import reachable_cells, to_cell
from solnav.render import render
from solnav.sim import (
    DIFFICULTIES,
    LANDMARK_IDS,
    generate_episode,
    generate_instruction,
    generate_world,
    episode_world,
)
from solnav.world import CameraModel, WALL_ID, pose_is_free, run_actions

SMALL_CAM = CameraModel(width=24, height=18)


class TestGenerateWorld:
    def test_deterministic(self):
        for difficulty in DIFFICULTIES:
            a = generate_world(3, difficulty)
            b = generate_world(3, difficulty)
            assert a == b
            assert a.difficulty == difficulty

    def test_different_seeds_differ(self):
        worlds = {generate_world(s, "cluttered").obstacles for s in range(6)}
        assert len(worlds) > 1

    def test_unknown_difficulty(self):
        with pytest.raises(ValueError):
            generate_world(0, "impossible")

    def test_landmark_ids_are_stable(self):
        assert LANDMARK_IDS == {
            "door": 3,
            "chair": 4,
            "table": 5,
            "plant": 6,
            "sofa": 7,
            "shelf": 8,
            "lamp": 9,
            "crate": 10,
            "bed": 11,
        }

    def test_label_tables_consistent_across_worlds(self):
        # The same category maps to the same id in every world it appears in.
        seen: dict[int, str] = {}
        for s in range(8):
            for difficulty in DIFFICULTIES:
                for i, name in generate_world(s, difficulty).label_table.items():
                    assert seen.setdefault(i, name) == name

    def test_obstacles_inside_bounds(self):
        for s in range(6):
            for difficulty in DIFFICULTIES:
                world = generate_world(s, difficulty)
                bw, bh = world.bounds
                for o in world.obstacles:
                    assert 0.0 <= o.x0 < o.x1 <= bw
                    assert 0.0 <= o.y0 < o.y1 <= bh


class TestGenerateInstruction:
    def test_deterministic_in_seed(self):
        world = generate_world(4, "cluttered")
        actions = [FORWARD, FORWARD, STOP]
        a = generate_instruction(world, actions, 11, goal_label="crate")
        b = generate_instruction(world, actions, 11, goal_label="crate")
        assert a == b

    def test_corridor_canonical_sentence(self):
        ep = generate_episode(0, "corridor", SMALL_CAM)
        assert ep.instruction.endswith("walk straight ahead and stop at the end of the corridor")

    def test_corridor_leading_turn_prefix(self):
        # Some corridor starts face sideways; their instructions open with a
        # turn phrase. Scan a seed range so the test does not pin the rng.
        prefixes = set()
        for s in range(25):
            instr = generate_episode(s, "corridor", SMALL_CAM).instruction
            if not instr.startswith("walk straight"):
                head = instr.split(", then ")[0]
                prefixes.add(head)
                assert head.startswith("turn")
        assert prefixes  # at least one turning start in 25 seeds

    def test_turn_left_mentions_door(self):
        # A route that turns left after the doorway names both facts.
        for s in range(40):
            ep = generate_episode(s, "rooms", SMALL_CAM)
            if "turn left" in ep.instruction:
                assert "door" in ep.instruction
                break
        else:
            pytest.fail("no left-turning rooms route in 40 seeds")

    def test_rooms_mentions_goal_landmark(self):
        for s in range(6):
            ep = generate_episode(s, "rooms", SMALL_CAM)
            world = episode_world(s, "rooms")
            assert "through the doorway" in ep.instruction
            goal_label = ep.instruction.rsplit("stop near the ", 1)[1]
            assert goal_label in world.label_table.values()
            lid = LANDMARK_IDS[goal_label]
            boxes = [o for o in world.obstacles if o.label_id == lid]
            assert boxes
            assert min(_box_dist(o, ep.goal) for o in boxes) < 1.0

    def test_cluttered_mentions_goal_landmark(self):
        for s in range(4):
            ep = generate_episode(s, "cluttered", SMALL_CAM)
            world = episode_world(s, "cluttered")
            named = [n for n in world.label_table.values() if n in ep.instruction]
            assert named


def _box_dist(o, p):
    dx = max(o.x0 - p[0], 0.0, p[0] - o.x1)
    dy = max(o.y0 - p[1], 0.0, p[1] - o.y1)
    return math.hypot(dx, dy)


class TestGenerateEpisode:
    @pytest.mark.parametrize("difficulty", DIFFICULTIES)
    def test_episode_invariants(self, difficulty):
        ep = generate_episode(7, difficulty, SMALL_CAM)
        assert ep.episode_id == f"{difficulty}_00007"
        assert len(ep.frames) == len(ep.actions)
        assert ep.actions[-1] == STOP
        assert ep.actions.count(STOP) == 1
        forwards = ep.actions.count(FORWARD)
        assert ep.shortest_path_length <= 0.25 * forwards + 1e-9
        assert ep.shortest_path_length > 0

    @pytest.mark.parametrize("difficulty", DIFFICULTIES)
    def test_oracle_reaches_goal(self, difficulty):
        ep = generate_episode(5, difficulty, SMALL_CAM)
        world = episode_world(5, difficulty)
        poses = run_actions(world, ep.start, ep.actions)
        final = poses[-1]
        assert math.dist((final.x, final.y), ep.goal) <= 0.25 + 1e-9
        for p in poses:
            assert pose_is_free(world, p.x, p.y)

    def test_start_goal_separation_and_reachability(self):
        for s in range(5):
            for difficulty in DIFFICULTIES:
                ep = generate_episode(s, difficulty, SMALL_CAM)
                world = episode_world(s, difficulty)
                assert math.dist((ep.start.x, ep.start.y), ep.goal) >= 2.0
                assert to_cell(*ep.goal) in reachable_cells(world, (ep.start.x, ep.start.y))

    def test_deterministic(self):
        a = generate_episode(9, "rooms", SMALL_CAM)
        b = generate_episode(9, "rooms", SMALL_CAM)
        assert a.instruction == b.instruction
        assert a.actions == b.actions
        assert a.start == b.start and a.goal == b.goal
        assert a.shortest_path_length == b.shortest_path_length
        for fa, fb in zip(a.frames, b.frames):
            np.testing.assert_array_equal(fa.rgb, fb.rgb)
            np.testing.assert_array_equal(fa.depth, fb.depth)
            np.testing.assert_array_equal(fa.segmentation, fb.segmentation)

    def test_frames_match_pre_action_poses(self):
        ep = generate_episode(3, "corridor", SMALL_CAM)
        world = episode_world(3, "corridor")
        poses = run_actions(world, ep.start, ep.actions)
        # Frame i is the view before action i; the post-stop pose is unseen.
        for i in (0, 1, len(ep.frames) - 1):
            expect = render(world, poses[i], SMALL_CAM)
            np.testing.assert_array_equal(ep.frames[i].rgb, expect.rgb)
            np.testing.assert_array_equal(ep.frames[i].segmentation, expect.segmentation)

    def test_episode_world_matches_first_frame(self):
        ep = generate_episode(12, "cluttered", SMALL_CAM)
        world = episode_world(12, "cluttered")
        expect = render(world, ep.start, SMALL_CAM)
        np.testing.assert_array_equal(ep.frames[0].rgb, expect.rgb)

    def test_corridor_batch_all_valid(self):
        # One hundred corridor seeds generate without a planner or layout
        # failure, and every oracle path ends on the goal.
        for s in range(100):
            ep = generate_episode(s, "corridor", SMALL_CAM)
            assert ep.actions[-1] == STOP
            assert len(ep.frames) == len(ep.actions)

    def test_goal_in_front_room_for_rooms(self):
        # Rooms goals sit against the far wall, past the divider.
        for s in range(5):
            ep = generate_episode(s, "rooms", SMALL_CAM)
            world = episode_world(s, "rooms")
            dividers = [o for o in world.obstacles if o.label_id == WALL_ID]
            assert dividers
            # Divider is a thin slab; goal and start straddle it.
            d = dividers[0]
            if d.x1 - d.x0 <= 0.5:
                lo, hi = d.x0, d.x1
                s_val, g_val = ep.start.x, ep.goal[0]
            else:
                lo, hi = d.y0, d.y1
                s_val, g_val = ep.start.y, ep.goal[1]
            assert (s_val < lo and g_val > hi) or (s_val > hi and g_val < lo)
