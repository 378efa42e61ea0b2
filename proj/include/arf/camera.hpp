#pragma once

#include "arf/math.hpp"

namespace arf {

// Pinhole camera. Extrinsic maps world -> camera; camera frame is x-right,
// y-down, z-forward with pixel (0,0) at the top-left corner.
struct Camera {
  double fx = 128, fy = 128;
  double cx = 64, cy = 64;
  int width = 128, height = 128;
  Rigidd extrinsic;  // world -> camera

  void validate() const {
    if (!(fx > 0) || !(fy > 0)) throw std::invalid_argument("camera: focal must be positive");
    if (width < 1 || height < 1) throw std::invalid_argument("camera: empty image");
    if (cx < 0 || cx > width || cy < 0 || cy > height)
      throw std::invalid_argument("camera: principal point outside image");
    if (!extrinsic.is_rotation(1e-6)) throw std::invalid_argument("camera: extrinsic not rigid");
  }

  Vec3d position() const { return extrinsic.inverse().translation; }

  // Continuous pixel coordinates of a world point (and its camera depth).
  Vec3d project(const Vec3d& x_world) const {
    const Vec3d c = extrinsic.apply(x_world);
    return {fx * c.x / c.z + cx, fy * c.y / c.z + cy, c.z};
  }

  static Camera look_at(const Vec3d& eye, const Vec3d& target, const Vec3d& up, double focal,
                        int width, int height) {
    Camera cam;
    cam.width = width;
    cam.height = height;
    cam.fx = cam.fy = focal;
    cam.cx = width * 0.5;
    cam.cy = height * 0.5;
    const Vec3d fwd = (target - eye).normalized();
    Vec3d down = -up + fwd * up.dot(fwd);
    down = down.normalized();
    const Vec3d right = down.cross(fwd);
    Mat3d r;
    r.m = {right.x, right.y, right.z, down.x, down.y, down.z, fwd.x, fwd.y, fwd.z};
    cam.extrinsic.rotation = r;
    cam.extrinsic.translation = -(r * eye);
    return cam;
  }
};

struct Ray {
  Vec3d origin;
  Vec3d direction;  // unit
  double t_near = 0.0;
  double t_far = 0.0;

  Vec3d at(double t) const { return origin + direction * t; }
};

// Ray through the center of pixel (px, py).
inline Ray generate_ray(const Camera& camera, int px, int py) {
  if (px < 0 || py < 0 || px >= camera.width || py >= camera.height)
    throw std::invalid_argument("generate_ray: pixel outside image");
  const Vec3d dir_cam{(px + 0.5 - camera.cx) / camera.fx, (py + 0.5 - camera.cy) / camera.fy, 1.0};
  const Mat3d r_t = camera.extrinsic.rotation.transposed();
  Ray ray;
  ray.origin = -(r_t * camera.extrinsic.translation);
  ray.direction = (r_t * dir_cam).normalized();
  return ray;
}

}  // namespace arf
