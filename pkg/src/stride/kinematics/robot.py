"""
Robot model description.

The floating base is expanded into six virtual joints (x, y, z prismatic,
then yaw, pitch, roll revolute) so that ``qd`` is exactly ``dq/dt`` and
every body hangs from a uniform tree of one-dof joints. Coordinates are
ordered ``[x, y, z, roll, pitch, yaw, joints...]``.
"""

import json
import logging
import os

import numpy as np

from ..config import get_config, get_data_path, register_config
from ..errors import ModelError

__all__ = [
    "Link",
    "Joint",
    "Contact",
    "LegGeometry",
    "RobotModel",
    "load_model",
    "model_from_dict",
    "BASE_JOINTS",
    "PLANAR_DOFS",
]

LOG = logging.getLogger(__name__)

register_config(
    name="robot",
    default={
        "model": "biped2d",
    })

# (name, axis, kind, q index): chain order x, y, z, yaw, pitch, roll
BASE_JOINTS = (
    ("base_x", (1.0, 0.0, 0.0), "prismatic", 0),
    ("base_y", (0.0, 1.0, 0.0), "prismatic", 1),
    ("base_z", (0.0, 0.0, 1.0), "prismatic", 2),
    ("base_yaw", (0.0, 0.0, 1.0), "revolute", 5),
    ("base_pitch", (0.0, 1.0, 0.0), "revolute", 4),
    ("base_roll", (1.0, 0.0, 0.0), "revolute", 3),
)

# base coordinates kept by the planar lift: x, z, pitch
PLANAR_DOFS = (0, 2, 4)


class Link(object):
    def __init__(self, name, mass, inertia, com, joint=None):
        self.name = name
        self.mass = float(mass)
        inertia = np.asarray(inertia, dtype=float)
        if inertia.shape == (3,):
            inertia = np.diag(inertia)
        self.inertia = inertia
        self.com = np.asarray(com, dtype=float)
        self.joint = joint

    def __repr__(self):
        return "{}(name={!r}, mass={!r})".format(type(self).__name__, self.name, self.mass)


class Joint(object):
    def __init__(self, name, parent, child, axis, origin, kind="revolute", q_index=None,
                 limits=(-np.inf, np.inf), torque_limit=np.inf):
        self.name = name
        self.parent = parent          # parent joint index, -1 for the root
        self.child = child            # child link index
        axis = np.asarray(axis, dtype=float)
        self.axis = axis / np.linalg.norm(axis)
        self.origin = np.asarray(origin, dtype=float)
        self.kind = kind
        self.q_index = q_index
        self.limits = (float(limits[0]), float(limits[1]))
        self.torque_limit = float(torque_limit)

    def __repr__(self):
        return "{}(name={!r}, q_index={!r})".format(type(self).__name__, self.name, self.q_index)


class Contact(object):
    def __init__(self, name, link, position, foot):
        self.name = name
        self.link = link
        self.position = np.asarray(position, dtype=float)
        self.foot = foot


class LegGeometry(object):
    """Per-side leg data used by the analytic IK"""

    def __init__(self, side, joints, contact, r_c1=(0.0, 0.0, 0.0)):
        self.side = side
        self.sign = 1.0 if side == "left" else -1.0
        self.joints = list(joints)    # q indices, hip first
        self.contact = contact
        self.r_c1 = np.asarray(r_c1, dtype=float)


class RobotModel(object):
    """Kinematic tree plus inertial data.

       Attributes
       ----------
       links: list of Link
       joints: list of Joint, virtual base joints first, topologically ordered
       contacts: list of Contact
       planar: bool
           sagittal-plane model lifted into 3-D (y, roll, yaw stay zero)
    """

    def __init__(self, name, links, joints, contacts, legs, mass, planar=False,
                 l1=0.22, l2=0.22, l_f=0.0, r_21_y=0.0, gravity=9.81):
        self.name = name
        self.links = links
        self.joints = joints
        self.contacts = contacts
        self.legs = legs
        self.planar = bool(planar)
        self.l1 = float(l1)
        self.l2 = float(l2)
        self.l_f = float(l_f)
        self.r_21_y = float(r_21_y)
        self.gravity = float(gravity)
        self.n_j = len(joints) - len(BASE_JOINTS)
        self.nq = 6 + self.n_j
        self.total_mass = float(sum(link.mass for link in links))
        if abs(self.total_mass - mass) > 1e-12:
            raise ModelError("{}: link masses sum to {!r}, configured mass is {!r}".format(
                name, self.total_mass, mass))
        if self.planar:
            self.dofs = np.array(PLANAR_DOFS + tuple(range(6, self.nq)), dtype=int)
        else:
            self.dofs = np.arange(self.nq)
        self.actuated = np.arange(6, self.nq)
        self._contact_index = {contact.name: index for index, contact in enumerate(contacts)}
        self.support = []
        for link in links:
            chain = []
            jnt = link.joint
            while jnt >= 0:
                chain.append(jnt)
                jnt = joints[jnt].parent
            self.support.append(np.array(chain[::-1], dtype=int))
        self.q_index = np.array([joint.q_index for joint in joints], dtype=int)
        self.revolute = np.array([joint.kind == "revolute" for joint in joints], dtype=bool)

    @property
    def mass(self):
        return self.total_mass

    @property
    def feet(self):
        return [leg.side for leg in self.legs]

    def contact_index(self, contact_id):
        if isinstance(contact_id, (int, np.integer)):
            if not 0 <= contact_id < len(self.contacts):
                raise ModelError("unknown contact {!r}".format(contact_id))
            return int(contact_id)
        try:
            return self._contact_index[contact_id]
        except KeyError:
            raise ModelError("unknown contact {!r}".format(contact_id)) from None

    def leg(self, side):
        for leg in self.legs:
            if leg.side == side:
                return leg
        raise ModelError("unknown leg {!r}".format(side))

    def torque_limits(self):
        return np.array([self.joints[6 + i].torque_limit for i in range(self.n_j)])

    def joint_limits(self):
        return np.array([self.joints[6 + i].limits for i in range(self.n_j)])

    def check_state(self, q, qd=None):
        q = np.asarray(q, dtype=float)
        if q.shape != (self.nq,):
            raise ModelError("{}: q has shape {}, expected ({},)".format(self.name, q.shape, self.nq))
        if qd is not None:
            qd = np.asarray(qd, dtype=float)
            if qd.shape != (self.nq,):
                raise ModelError("{}: qd has shape {}, expected ({},)".format(self.name, qd.shape, self.nq))
        return q, qd

    def with_payload(self, mass_delta, link=0):
        """Copy of the model with extra point mass added at the CoM of ``link``"""
        links = [Link(lk.name, lk.mass, lk.inertia, lk.com, lk.joint) for lk in self.links]
        links[link].mass += float(mass_delta)
        model = RobotModel.__new__(RobotModel)
        model.__dict__.update(self.__dict__)
        model.links = links
        model.total_mass = float(sum(lk.mass for lk in links))
        return model

    def __repr__(self):
        return "{}(name={!r}, nq={!r}, planar={!r})".format(type(self).__name__, self.name, self.nq, self.planar)


def model_from_dict(data):
    """Builds a RobotModel from its JSON description"""
    try:
        link_data = data["links"]
        joint_data = data["joints"]
        contact_data = data["contacts"]
        leg_data = data["legs"]
    except KeyError as err:
        raise ModelError("model description misses {}".format(err)) from None
    links = []
    link_index = {}
    for entry in link_data:
        link_index[entry["name"]] = len(links)
        links.append(Link(entry["name"], entry["mass"], entry["inertia"], entry.get("com", (0.0, 0.0, 0.0))))
    joints = []
    for name, axis, kind, q_index in BASE_JOINTS:
        joints.append(Joint(name, len(joints) - 1, None, axis, (0.0, 0.0, 0.0), kind=kind, q_index=q_index))
    root = links[0]
    root.joint = len(joints) - 1
    joints[-1].child = 0
    joint_index = {}
    for count, entry in enumerate(joint_data):
        parent_name, child_name = entry["parent"], entry["child"]
        if parent_name not in link_index or child_name not in link_index:
            raise ModelError("joint {!r}: unknown link".format(entry["name"]))
        parent_link = links[link_index[parent_name]]
        if parent_link.joint is None:
            raise ModelError("joint {!r}: parent link {!r} is not attached yet".format(entry["name"], parent_name))
        child = link_index[child_name]
        if links[child].joint is not None:
            raise ModelError("link {!r} has two parent joints".format(child_name))
        joint_index[entry["name"]] = len(joints)
        joints.append(Joint(entry["name"], parent_link.joint, child, entry["axis"], entry.get("origin", (0.0, 0.0, 0.0)),
                            kind="revolute", q_index=6 + count,
                            limits=entry.get("limits", (-np.inf, np.inf)),
                            torque_limit=entry.get("torque_limit", np.inf)))
        links[child].joint = len(joints) - 1
    for link in links:
        if link.joint is None:
            raise ModelError("link {!r} is not attached".format(link.name))
    contacts = []
    for entry in contact_data:
        if entry["link"] not in link_index:
            raise ModelError("contact {!r}: unknown link {!r}".format(entry["name"], entry["link"]))
        contacts.append(Contact(entry["name"], link_index[entry["link"]], entry["position"], entry.get("foot", entry["name"])))
    legs = []
    for side in ("left", "right"):
        entry = leg_data[side]
        q_indices = [joints[joint_index[name]].q_index for name in entry["joints"]]
        legs.append(LegGeometry(side, q_indices, entry["contact"], entry.get("r_c1", (0.0, 0.0, 0.0))))
    return RobotModel(
        name=data.get("name", "robot"),
        links=links, joints=joints, contacts=contacts, legs=legs,
        mass=data["mass"], planar=data.get("planar", False),
        l1=leg_data["l1"], l2=leg_data["l2"], l_f=leg_data.get("l_f", 0.0),
        r_21_y=leg_data.get("r_21_y", 0.0), gravity=data.get("gravity", 9.81))


def load_model(name_or_path=None):
    """Loads a model JSON; bare names resolve to the packaged models"""
    if name_or_path is None:
        name_or_path = get_config()["robot"]["model"]
    if os.path.exists(name_or_path):
        filename = name_or_path
    else:
        filename = get_data_path("models", name_or_path + ".json")
        if not os.path.exists(filename):
            raise FileNotFoundError("model {!r} not found".format(name_or_path))
    with open(filename, "r") as fp:
        data = json.load(fp)
    LOG.debug("model %s loaded from %s", data.get("name"), filename)
    return model_from_dict(data)
